// Copyright 2026 The phireg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHIREG_PHI_TEMPLATE_H_
#define PHIREG_PHI_TEMPLATE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"
#include "phireg/deviation_dag.h"
#include "phireg/polynomial.h"
#include "phireg/regret.h"
#include "phireg/strategy_maps.h"

namespace phireg {

enum class FixedPointInit {
  // x_1 is the uniform behavioral point every round.
  kUniform,
  // x_1 is the point the previous round's iteration would have visited next.
  kWarmStart,
};

struct FixedPointConfig {
  int iterations = 100;  // L
  StrategyMap map = StrategyMap::kBehavioral;
  FixedPointInit init = FixedPointInit::kUniform;
};

// L = ceil(2 / eps) gives an eps-expected fixed point.
int IterationsForError(double eps);

struct ExpectedFixedPoint {
  std::vector<Vec> iterates;  // x_1 .. x_{L+1}
  Mixture pi;                 // uniform over delta(x_1) .. delta(x_L)
  Vec mean;                   // E_{x ~ pi} x
  Vec error;                  // (x_{L+1} - x_1) / L = E_pi[phi(x) - x]
};

// Iterates x_{l+1} = eval(x_l) from `start` and mixes delta over the first L
// iterates. Every iterate is checked for membership; a failure means the
// evaluator is not a valid deviation and raises InvalidDeviation.
ExpectedFixedPoint ComputeExpectedFixedPoint(
    const DecisionProblem& problem,
    const std::function<Vec(std::span<const double>)>& eval,
    std::span<const double> start, int iterations, StrategyMap map);

// Polynomial deviation with its extended map.
ExpectedFixedPoint ComputeExpectedFixedPoint(const DecisionProblem& problem,
                                             const PolynomialDeviation& phi,
                                             const FixedPointConfig& cfg,
                                             std::span<const double> start);
ExpectedFixedPoint ComputeExpectedFixedPoint(const DecisionProblem& problem,
                                             const PolynomialDeviation& phi,
                                             const FixedPointConfig& cfg);

// A learner over mixed strategies of one decision problem.
class MixedStrategyLearner {
 public:
  virtual ~MixedStrategyLearner() = default;
  virtual Mixture Next() = 0;
  virtual void Observe(std::span<const double> u) = 0;
};

// Accumulates the time-averaged regret against a deviation set:
// (1/T) [max_q sum_t <W_t, q> - sum_t <u_t, E_{pi_t} x>].
class PhiRegretMeter {
 public:
  PhiRegretMeter(const DecisionProblem& base, const DeviationDag& dag);

  // Returns W_t.
  Vec Record(std::span<const double> u, const Mixture& pi);
  void RecordWeights(std::span<const double> w, double baseline);

  double Value() const;
  BestReduced Best() const;
  int rounds() const { return rounds_; }
  const Vec& cumulative_weights() const { return sum_w_; }
  double cumulative_baseline() const { return sum_baseline_; }

 private:
  const DecisionProblem* base_;
  const DeviationDag* dag_;
  Vec sum_w_;
  double sum_baseline_ = 0.0;
  int rounds_ = 0;
};

// Minimizes regret against the reduced strategies of a deviation DAG: each
// round asks DAG-CFR for a deviation and plays an expected fixed point of it.
class PhiRegretMinimizer : public MixedStrategyLearner {
 public:
  PhiRegretMinimizer(const DecisionProblem& base, DeviationDag dag,
                     FixedPointConfig cfg);

  Mixture Next() override;
  void Observe(std::span<const double> u) override;

  const DecisionProblem& base() const { return *base_; }
  const DeviationDag& dag() const { return *dag_; }
  const FixedPointConfig& config() const { return cfg_; }
  int rounds() const { return meter_.rounds(); }

  const ReducedStrategy& last_deviation() const { return q_; }
  const PolynomialDeviation& last_polynomial() const { return phi_; }
  const ExpectedFixedPoint& last_fixed_point() const { return fp_; }

  double PhiRegret() const { return meter_.Value(); }
  double ExternalRegret() const { return external_.AverageRegret(); }
  double FixedPointErrorBound() const { return 2.0 / cfg_.iterations; }
  const PhiRegretMeter& meter() const { return meter_; }

 private:
  const DecisionProblem* base_;
  std::unique_ptr<DeviationDag> dag_;
  FixedPointConfig cfg_;
  DagCfr cfr_;
  PhiRegretMeter meter_;
  ExternalRegretMeter external_;
  ReducedStrategy q_;
  PolynomialDeviation phi_;
  ExpectedFixedPoint fp_;
  Vec next_start_;
  bool pending_ = false;
};

struct CurvePoint {
  int round = 0;
  double phi_regret = 0.0;
  double external_regret = 0.0;
  double fp_error_bound = 0.0;
};

void WriteCurvesCsv(std::ostream& out, const std::vector<CurvePoint>& curve);

// Exponential weights over the enumerated pure strategies.
class PureMwuLearner : public MixedStrategyLearner {
 public:
  PureMwuLearner(const DecisionProblem& problem, int horizon = 0,
                 std::int64_t cap = kDefaultEnumerationCap);
  Mixture Next() override;
  void Observe(std::span<const double> u) override;

 private:
  std::vector<Vec> pure_;
  Mwu mwu_;
};

struct ExtractionResult {
  bool converged = false;
  int rounds = 0;
  Mixture pi;
  Vec error;  // E_pi[phi(x) - x]
  double error_norm = 0.0;  // Euclidean
  double threshold = 0.0;   // eps * D_X
};

// Runs `learner` against the utilities that reward moving toward phi, until
// the Euclidean fixed-point error drops to eps * D_X or the budget runs out.
ExtractionResult ExtractExpectedFixedPoint(const DecisionProblem& problem,
                                           MixedStrategyLearner& learner,
                                           const PolynomialDeviation& phi,
                                           double eps, int max_rounds);

}  // namespace phireg

#endif  // PHIREG_PHI_TEMPLATE_H_
