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

#ifndef PHIREG_REGRET_H_
#define PHIREG_REGRET_H_

#include <span>
#include <utility>
#include <vector>

#include "phireg/common.h"
#include "phireg/deviation_dag.h"

namespace phireg {

// Counterfactual regret minimization with regret matching+ local learners,
// run directly on the states of a deviation DAG. Mass reaching a state along
// several in-edges is summed before it is split, and the weights passed to
// Observe already carry every environment factor, so local regrets are the
// plain differences of state values.
class DagCfr {
 public:
  explicit DagCfr(const DeviationDag& dag);

  // Current strategy. Calling Next twice without Observe returns the same
  // strategy.
  ReducedStrategy Next() const;
  void Observe(std::span<const double> w);

  // Local distribution at decision state s.
  Vec LocalPolicy(int s) const;
  const Vec& regrets() const { return regrets_; }
  int rounds() const { return rounds_; }
  // Uniform average of the strategies played so far.
  ReducedStrategy Average() const;

 private:
  const DeviationDag* dag_;
  Vec regrets_;  // one per edge
  Vec sum_terminal_;
  Vec sum_flow_;
  int rounds_ = 0;
};

// Exponential weights over a finite set of arms.
//
// With a known horizon T the step size is sqrt(ln A / T). Without one the
// anytime schedule sqrt(ln A / t) is applied to the cumulative utilities.
class Mwu {
 public:
  // The step is step_scale * sqrt(ln arms / t), t being the horizon when
  // given and the rounds seen so far otherwise.
  explicit Mwu(int arms, int horizon = 0, double step_scale = 1.0);

  Vec Next() const;
  // Adds scale * u to the cumulative utilities. A zero scale is a no-op.
  void Observe(std::span<const double> u, double scale = 1.0);

  int arms() const { return static_cast<int>(cumulative_.size()); }
  int rounds() const { return rounds_; }
  double step_size() const;

 private:
  Vec cumulative_;
  int horizon_;
  double step_scale_;
  int rounds_ = 0;
};

// Tracks (1/T) [max_q sum_t <W_t, q> - sum_t <W_t, q_t>] exactly.
class ExternalRegretMeter {
 public:
  explicit ExternalRegretMeter(const DeviationDag& dag);

  void Record(std::span<const double> w, std::span<const double> q);
  double AverageRegret() const;
  int rounds() const { return rounds_; }
  const Vec& cumulative_weights() const { return sum_w_; }
  double cumulative_played() const { return sum_played_; }

 private:
  const DeviationDag* dag_;
  Vec sum_w_;
  double sum_played_ = 0.0;
  int rounds_ = 0;
};

double MeasureExternalRegret(
    const DeviationDag& dag,
    const std::vector<std::pair<Vec, Vec>>& weights_and_strategies);

}  // namespace phireg

#endif  // PHIREG_REGRET_H_
