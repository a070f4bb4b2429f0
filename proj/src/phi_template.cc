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

#include "phireg/phi_template.h"

#include <cmath>
#include <iomanip>

#include "phireg/norm.h"

namespace phireg {

// Iterates drift by rounding only; this is far below any flow violation a
// genuinely invalid deviation would produce.
constexpr double kIterateTolerance = 1e-8;

int IterationsForError(double eps) {
  if (!(eps > 0.0)) throw PhiregError("IterationsForError: need eps > 0");
  return static_cast<int>(std::ceil(2.0 / eps));
}

ExpectedFixedPoint ComputeExpectedFixedPoint(
    const DecisionProblem& problem,
    const std::function<Vec(std::span<const double>)>& eval,
    std::span<const double> start, int iterations, StrategyMap map) {
  if (iterations < 1) throw PhiregError("expected fixed point: need L >= 1");
  if (!Membership(problem, start, kIterateTolerance)) {
    throw PhiregError("expected fixed point: start is not a strategy");
  }
  ExpectedFixedPoint fp;
  fp.iterates.reserve(iterations + 1);
  fp.iterates.emplace_back(start.begin(), start.end());
  for (int ell = 0; ell < iterations; ++ell) {
    Vec next = eval(fp.iterates.back());
    if (!Membership(problem, next, kIterateTolerance)) {
      throw InvalidDeviation(
          "deviation maps iterate " + std::to_string(ell + 1) +
          " outside the strategy polytope");
    }
    fp.iterates.push_back(std::move(next));
  }
  const std::vector<Vec> played(fp.iterates.begin(), fp.iterates.end() - 1);
  fp.pi = MixtureOfIterates(problem, map, played);
  const int n = problem.num_terminals();
  fp.mean.assign(n, 0.0);
  for (const Vec& x : played) {
    for (int z = 0; z < n; ++z) fp.mean[z] += x[z] / iterations;
  }
  fp.error.assign(n, 0.0);
  for (int z = 0; z < n; ++z) {
    fp.error[z] = (fp.iterates.back()[z] - fp.iterates.front()[z]) / iterations;
  }
  return fp;
}

ExpectedFixedPoint ComputeExpectedFixedPoint(const DecisionProblem& problem,
                                             const PolynomialDeviation& phi,
                                             const FixedPointConfig& cfg,
                                             std::span<const double> start) {
  auto eval = [&](std::span<const double> x) {
    return ExtendedMapEval(problem, phi, x, cfg.map);
  };
  return ComputeExpectedFixedPoint(problem, eval, start, cfg.iterations,
                                   cfg.map);
}

ExpectedFixedPoint ComputeExpectedFixedPoint(const DecisionProblem& problem,
                                             const PolynomialDeviation& phi,
                                             const FixedPointConfig& cfg) {
  return ComputeExpectedFixedPoint(problem, phi, cfg,
                                   UniformBehavioralPoint(problem));
}

PhiRegretMeter::PhiRegretMeter(const DecisionProblem& base,
                               const DeviationDag& dag)
    : base_(&base), dag_(&dag), sum_w_(dag.num_terminals(), 0.0) {}

Vec PhiRegretMeter::Record(std::span<const double> u, const Mixture& pi) {
  Vec w = TerminalWeights(*dag_, *base_, u, pi);
  RecordWeights(w, Dot(u, pi.Mean(base_->num_terminals())));
  return w;
}

void PhiRegretMeter::RecordWeights(std::span<const double> w, double baseline) {
  for (std::size_t i = 0; i < w.size(); ++i) sum_w_[i] += w[i];
  sum_baseline_ += baseline;
  ++rounds_;
}

BestReduced PhiRegretMeter::Best() const {
  return BestReducedStrategy(*dag_, sum_w_);
}

double PhiRegretMeter::Value() const {
  if (rounds_ == 0) return 0.0;
  return (Best().value - sum_baseline_) / rounds_;
}

PhiRegretMinimizer::PhiRegretMinimizer(const DecisionProblem& base,
                                       DeviationDag dag, FixedPointConfig cfg)
    : base_(&base),
      dag_(std::make_unique<DeviationDag>(std::move(dag))),
      cfg_(cfg),
      cfr_(*dag_),
      meter_(base, *dag_),
      external_(*dag_),
      next_start_(UniformBehavioralPoint(base)) {
  if (dag_->num_base_terminals() != base.num_terminals()) {
    throw PhiregError("PhiRegretMinimizer: deviation set built for another problem");
  }
  if (cfg_.iterations < 1) throw PhiregError("PhiRegretMinimizer: need L >= 1");
}

Mixture PhiRegretMinimizer::Next() {
  q_ = cfr_.Next();
  phi_ = ToPolynomial(*dag_, q_.terminal);
  const Vec start = cfg_.init == FixedPointInit::kWarmStart
                        ? next_start_
                        : UniformBehavioralPoint(*base_);
  fp_ = ComputeExpectedFixedPoint(*base_, phi_, cfg_, start);
  next_start_ = fp_.iterates.back();
  pending_ = true;
  return fp_.pi;
}

void PhiRegretMinimizer::Observe(std::span<const double> u) {
  if (!pending_) throw PhiregError("PhiRegretMinimizer: Observe before Next");
  const Vec w = TerminalWeights(*dag_, *base_, u, fp_.pi);
  meter_.RecordWeights(w, Dot(u, fp_.mean));
  external_.Record(w, q_.terminal);
  cfr_.Observe(w);
  pending_ = false;
}

void WriteCurvesCsv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "round,phi_regret,external_regret,fp_error_bound\n";
  out << std::setprecision(17);
  for (const auto& p : curve) {
    out << p.round << "," << p.phi_regret << "," << p.external_regret << ","
        << p.fp_error_bound << "\n";
  }
}

PureMwuLearner::PureMwuLearner(const DecisionProblem& problem, int horizon,
                               std::int64_t cap)
    : pure_(EnumeratePureStrategies(problem, cap)),
      mwu_(static_cast<int>(pure_.size()), horizon) {}

Mixture PureMwuLearner::Next() {
  const Vec p = mwu_.Next();
  Mixture mix;
  mix.map = StrategyMap::kCaratheodory;
  mix.num_iterates = 1;
  for (std::size_t j = 0; j < pure_.size(); ++j) {
    if (p[j] > 0.0) mix.Add(nullptr, 0, static_cast<int>(j), p[j], pure_[j]);
  }
  return mix;
}

void PureMwuLearner::Observe(std::span<const double> u) {
  Vec arm(pure_.size());
  for (std::size_t j = 0; j < pure_.size(); ++j) arm[j] = Dot(u, pure_[j]);
  mwu_.Observe(arm);
}

ExtractionResult ExtractExpectedFixedPoint(const DecisionProblem& problem,
                                           MixedStrategyLearner& learner,
                                           const PolynomialDeviation& phi,
                                           double eps, int max_rounds) {
  const int n = problem.num_terminals();
  const double diameter = EuclideanDiameter(problem);
  // Any pure strategy y of the dual problem has <x, y> = 1 on every pure x,
  // which turns the affine utility <e, x - mean> into a linear one.
  const DecisionProblem dual = Dual(problem);
  const Vec zeros(n, 0.0);
  const Vec y = BestPureResponse(dual, zeros).strategy;

  ExtractionResult result;
  result.threshold = eps * diameter;
  for (int t = 1; t <= max_rounds; ++t) {
    result.rounds = t;
    result.pi = learner.Next();
    const Vec mean = result.pi.Mean(n);
    const Vec image = MixtureImage(problem, phi, result.pi);
    result.error.assign(n, 0.0);
    for (int z = 0; z < n; ++z) result.error[z] = image[z] - mean[z];
    result.error_norm = std::sqrt(Dot(result.error, result.error));
    if (result.error_norm <= result.threshold) {
      result.converged = true;
      return result;
    }
    const double shift = Dot(result.error, mean);
    const double scale = 1.0 / (diameter * result.error_norm);
    Vec u(n);
    for (int z = 0; z < n; ++z) u[z] = (result.error[z] - shift * y[z]) * scale;
    learner.Observe(u);
  }
  return result;
}

}  // namespace phireg
