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

#ifndef PHIREG_STRATEGY_MAPS_H_
#define PHIREG_STRATEGY_MAPS_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"

namespace phireg {

// A consistent map from the strategy polytope to distributions over pure
// strategies.
enum class StrategyMap {
  // Independent action choices at every reached decision point.
  kBehavioral,
  // Small-support decomposition, at most N pure strategies.
  kCaratheodory,
};

std::string_view StrategyMapName(StrategyMap map);
// Accepts "beta"/"behavioral" and "cara"/"caratheodory".
StrategyMap ParseStrategyMap(std::string_view name);

struct SupportAtom {
  double weight = 0.0;
  Vec strategy;  // pure, 0/1 over terminals
};

using SupportMix = std::vector<SupportAtom>;

Vec Expectation(const SupportMix& mix, int num_terminals);

// E_{x' ~ beta(x)} prod_{z in monomial} x'[z], given the node values of x
// (DecisionProblem::NodeValues). Repeated indices are allowed and count once.
double MonomialExpectationBeta(const DecisionProblem& problem,
                               std::span<const double> node_values,
                               std::span<const int> monomial);

// Behavioral decomposition of x, enumerated exactly. At decision points with
// zero reach the lowest-index action is taken; such points never affect the
// tree-form representation.
SupportMix BetaSupport(const DecisionProblem& problem,
                       std::span<const double> x,
                       std::int64_t cap = kDefaultEnumerationCap);

// Decomposes x into at most N pure strategies by repeatedly peeling off the
// pure strategy that follows the largest remaining flow at each decision
// point. Throws if x fails membership.
SupportMix Caratheodory(const DecisionProblem& problem,
                        std::span<const double> x);

// A finite mixture of strategy-map outputs: uniform over `num_iterates`
// iterates, each expanded by the strategy map. For kBehavioral a component is
// a polytope point standing for beta(point) and has alpha 1; for
// kCaratheodory it is a pure atom with its coefficient alpha inside the
// iterate's decomposition. weight == alpha / num_iterates.
struct Mixture {
  struct Component {
    int ell = 0;    // iterate index
    int atom = -1;  // atom index within the iterate, -1 for behavioral
    double alpha = 1.0;
    double weight = 0.0;
    Vec point;
    Vec node_values;  // filled for kBehavioral only
  };

  StrategyMap map = StrategyMap::kBehavioral;
  int num_iterates = 1;
  std::vector<Component> components;

  // `problem` may be null for kCaratheodory mixtures.
  void Add(const DecisionProblem* problem, int ell, int atom, double alpha,
           Vec point);

  Vec Mean(int num_terminals) const;
  double TotalWeight() const;
  // E_{x ~ mixture} prod_{z in monomial} x[z].
  double MonomialExpectation(const DecisionProblem& problem,
                             std::span<const int> monomial) const;
};

// Expands the iterates x_1..x_L with the given map.
Mixture MixtureOfIterates(const DecisionProblem& problem, StrategyMap map,
                          const std::vector<Vec>& iterates);

}  // namespace phireg

#endif  // PHIREG_STRATEGY_MAPS_H_
