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

#include "phireg/strategy_maps.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

namespace phireg {

std::string_view StrategyMapName(StrategyMap map) {
  return map == StrategyMap::kBehavioral ? "beta" : "cara";
}

StrategyMap ParseStrategyMap(std::string_view name) {
  if (name == "beta" || name == "behavioral") return StrategyMap::kBehavioral;
  if (name == "cara" || name == "caratheodory") {
    return StrategyMap::kCaratheodory;
  }
  throw PhiregError("unknown strategy map '" + std::string(name) +
                    "' (expected beta or cara)");
}

Vec Expectation(const SupportMix& mix, int num_terminals) {
  Vec out(num_terminals, 0.0);
  for (const auto& atom : mix) {
    for (int z = 0; z < num_terminals; ++z) {
      out[z] += atom.weight * atom.strategy[z];
    }
  }
  return out;
}

double MonomialExpectationBeta(const DecisionProblem& problem,
                               std::span<const double> node_values,
                               std::span<const int> monomial) {
  // (decision point, chosen child) pairs on the paths to the monomial.
  std::vector<std::pair<int, int>> edges;
  for (int z : monomial) {
    if (z < 0 || z >= problem.num_terminals()) {
      throw PhiregError("MonomialExpectationBeta: terminal index " +
                        std::to_string(z) + " out of range");
    }
    int child = problem.terminal_node(z);
    for (int s = problem.node(child).parent; s >= 0;
         child = s, s = problem.node(s).parent) {
      if (problem.node(s).kind != NodeKind::kDecision) continue;
      auto it = std::find_if(edges.begin(), edges.end(),
                             [s](const auto& e) { return e.first == s; });
      if (it == edges.end()) {
        edges.emplace_back(s, child);
      } else if (it->second != child) {
        return 0.0;  // two different actions at the same decision point
      } else {
        break;  // the rest of the path is already recorded
      }
    }
  }
  double prod = 1.0;
  for (const auto& [j, c] : edges) {
    const double reach = node_values[j];
    if (reach > 0.0) prod *= std::clamp(node_values[c] / reach, 0.0, 1.0);
  }
  return prod;
}

SupportMix BetaSupport(const DecisionProblem& problem,
                       std::span<const double> x, std::int64_t cap) {
  if (CountPureStrategies(problem) > cap) {
    throw CapExceeded("BetaSupport: pure strategy count exceeds the cap of " +
                      std::to_string(cap));
  }
  const Vec values = problem.NodeValues(x);
  using Partial = std::pair<double, std::vector<int>>;
  std::function<std::vector<Partial>(int)> rec = [&](int s) {
    const Node& n = problem.node(s);
    if (n.kind == NodeKind::kTerminal) {
      return std::vector<Partial>{{1.0, {n.terminal}}};
    }
    if (n.kind == NodeKind::kDecision) {
      std::vector<Partial> out;
      if (values[s] <= 0.0) {
        return rec(n.children.front());
      }
      for (int c : n.children) {
        const double p = values[c] / values[s];
        if (p <= 0.0) continue;
        for (auto& [w, supp] : rec(c)) out.emplace_back(w * p, std::move(supp));
      }
      return out;
    }
    std::vector<Partial> acc = {{1.0, {}}};
    for (int c : n.children) {
      const auto sub = rec(c);
      std::vector<Partial> next;
      next.reserve(acc.size() * sub.size());
      for (const auto& [wa, sa] : acc) {
        for (const auto& [wb, sb] : sub) {
          std::vector<int> m = sa;
          m.insert(m.end(), sb.begin(), sb.end());
          next.emplace_back(wa * wb, std::move(m));
        }
      }
      acc = std::move(next);
    }
    return acc;
  };
  SupportMix mix;
  for (auto& [w, supp] : rec(problem.root())) {
    SupportAtom atom;
    atom.weight = w;
    atom.strategy.assign(problem.num_terminals(), 0.0);
    for (int z : supp) atom.strategy[z] = 1.0;
    mix.push_back(std::move(atom));
  }
  return mix;
}

SupportMix Caratheodory(const DecisionProblem& problem,
                        std::span<const double> x) {
  if (!Membership(problem, x)) {
    throw PhiregError("Caratheodory: point is not in the strategy polytope");
  }
  const int n = problem.num_terminals();
  Vec rest(x.begin(), x.end());
  for (double& r : rest) r = std::max(r, 0.0);
  SupportMix mix;
  constexpr double kNegligible = 1e-13;
  for (int peel = 0; peel <= n; ++peel) {
    const Vec values = problem.NodeValues(rest);
    if (values[problem.root()] <= kNegligible) break;
    Vec pure(n, 0.0);
    double lambda = values[problem.root()];
    std::vector<int> stack = {problem.root()};
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      const Node& node = problem.node(s);
      if (node.kind == NodeKind::kTerminal) {
        pure[node.terminal] = 1.0;
        lambda = std::min(lambda, rest[node.terminal]);
      } else if (node.kind == NodeKind::kObservation) {
        for (int c : node.children) stack.push_back(c);
      } else {
        int best = node.children.front();
        for (int c : node.children) {
          if (values[c] > values[best]) best = c;
        }
        stack.push_back(best);
      }
    }
    if (lambda <= 0.0) break;
    for (int z = 0; z < n; ++z) {
      if (pure[z] == 0.0) continue;
      rest[z] -= lambda;
      if (rest[z] < kNegligible) rest[z] = 0.0;
    }
    mix.push_back({lambda, std::move(pure)});
  }
  // Absorb rounding so the weights sum to one exactly.
  double total = 0.0;
  for (const auto& a : mix) total += a.weight;
  if (total <= 0.0) throw PhiregError("Caratheodory: empty decomposition");
  for (auto& a : mix) a.weight /= total;
  return mix;
}

void Mixture::Add(const DecisionProblem* problem, int ell, int atom,
                  double alpha, Vec point) {
  Component c;
  c.ell = ell;
  c.atom = atom;
  c.alpha = alpha;
  c.weight = alpha / num_iterates;
  if (map == StrategyMap::kBehavioral) {
    if (problem == nullptr) {
      throw PhiregError("Mixture::Add: behavioral components need a problem");
    }
    c.node_values = problem->NodeValues(point);
  }
  c.point = std::move(point);
  components.push_back(std::move(c));
}

Mixture MixtureOfIterates(const DecisionProblem& problem, StrategyMap map,
                          const std::vector<Vec>& iterates) {
  Mixture mix;
  mix.map = map;
  mix.num_iterates = static_cast<int>(iterates.size());
  for (int ell = 0; ell < mix.num_iterates; ++ell) {
    if (map == StrategyMap::kBehavioral) {
      mix.Add(&problem, ell, -1, 1.0, iterates[ell]);
      continue;
    }
    const SupportMix atoms = Caratheodory(problem, iterates[ell]);
    for (int j = 0; j < static_cast<int>(atoms.size()); ++j) {
      mix.Add(nullptr, ell, j, atoms[j].weight, atoms[j].strategy);
    }
  }
  return mix;
}

Vec Mixture::Mean(int num_terminals) const {
  Vec out(num_terminals, 0.0);
  for (const auto& c : components) {
    for (int z = 0; z < num_terminals; ++z) out[z] += c.weight * c.point[z];
  }
  return out;
}

double Mixture::TotalWeight() const {
  double w = 0.0;
  for (const auto& c : components) w += c.weight;
  return w;
}

double Mixture::MonomialExpectation(const DecisionProblem& problem,
                                    std::span<const int> monomial) const {
  double e = 0.0;
  if (map == StrategyMap::kBehavioral) {
    for (const auto& c : components) {
      e += c.weight * MonomialExpectationBeta(problem, c.node_values, monomial);
    }
    return e;
  }
  for (const auto& c : components) {
    double prod = 1.0;
    for (int z : monomial) prod *= c.point[z];
    e += c.weight * prod;
  }
  return e;
}

}  // namespace phireg
