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

// Shared test problems and brute-force oracles. The oracles here avoid the
// library's own traversal code on purpose.

#ifndef PHIREG_TESTS_FIXTURES_H_
#define PHIREG_TESTS_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"
#include "phireg/deviation_dag.h"
#include "phireg/polynomial.h"

namespace phireg::testing {

// Root decision A: take x1, or reach observation O, which reveals B or C;
// each of B and C then picks between two terminals.
inline constexpr const char* kFig1Text =
    "tfsdp fig1\n"
    "A D - -\n"
    "O O A 0\n"
    "x1 T A 1\n"
    "B D O b\n"
    "C D O c\n"
    "x2 T B 2\n"
    "x3 T B 3\n"
    "x4 T C 4\n"
    "x5 T C 5\n";

inline DecisionProblem Fig1() { return ParseProblem(kFig1Text); }

inline DecisionProblem SingleDecision(int actions) {
  std::vector<RawNode> raw = {{"r", NodeKind::kDecision, "", "", 0}};
  for (int a = 0; a < actions; ++a) {
    raw.push_back({"t" + std::to_string(a), NodeKind::kTerminal, "r",
                   std::to_string(a), 0});
  }
  return DecisionProblem::Build("single", std::move(raw));
}

// Random alternating tree. Decision points have 2..max_branch actions,
// observation points 1..3 outcomes. Regenerated until it has at most
// `max_pure` pure strategies.
inline DecisionProblem RandomProblem(std::mt19937_64& rng, int max_depth = 3,
                                     int max_branch = 3,
                                     long long max_pure = 64) {
  for (;;) {
    std::vector<RawNode> raw;
    int counter = 0;
    std::function<void(const std::string&, const std::string&, bool, int)> grow =
        [&](const std::string& parent, const std::string& action,
            bool decision, int depth) {
          const std::string id = "n" + std::to_string(counter++);
          std::uniform_real_distribution<double> coin(0.0, 1.0);
          const bool leaf = !parent.empty() && (depth >= max_depth || coin(rng) < 0.3);
          if (leaf) {
            raw.push_back({id, NodeKind::kTerminal, parent, action, 0});
            return;
          }
          raw.push_back({id, decision ? NodeKind::kDecision : NodeKind::kObservation,
                         parent, action, 0});
          std::uniform_int_distribution<int> width(decision ? 2 : 1,
                                                   decision ? max_branch : 3);
          const int w = width(rng);
          for (int c = 0; c < w; ++c) {
            grow(id, std::to_string(c), !decision, depth + (decision ? 1 : 0));
          }
        };
    grow("", "", std::uniform_int_distribution<int>(0, 1)(rng) == 0, 0);
    DecisionProblem p = DecisionProblem::Build("random", raw);
    if (p.num_terminals() >= 2 && CountPureStrategies(p) <= max_pure) return p;
  }
}

// Pure strategies by brute force: every assignment of one action to every
// decision point, mapped to its terminal indicator and deduplicated.
inline std::vector<Vec> BrutePureStrategies(const DecisionProblem& p) {
  const auto& dps = p.decision_points();
  std::vector<int> choice(dps.size(), 0);
  std::set<Vec> seen;
  std::vector<Vec> out;
  for (;;) {
    Vec x(p.num_terminals(), 0.0);
    for (int z = 0; z < p.num_terminals(); ++z) {
      int s = p.terminal_node(z);
      bool reached = true;
      while (p.node(s).parent >= 0) {
        const int par = p.node(s).parent;
        if (p.node(par).kind == NodeKind::kDecision) {
          const auto it = std::find(dps.begin(), dps.end(), par);
          const int j = static_cast<int>(it - dps.begin());
          if (p.node(par).children[choice[j]] != s) reached = false;
        }
        s = par;
      }
      x[z] = reached ? 1.0 : 0.0;
    }
    if (seen.insert(x).second) out.push_back(x);
    std::size_t j = 0;
    for (; j < dps.size(); ++j) {
      if (++choice[j] < static_cast<int>(p.node(dps[j]).children.size())) break;
      choice[j] = 0;
    }
    if (j == dps.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Vec> Sorted(std::vector<Vec> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline double MaxAbsDiff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : INFINITY;
}

inline double L1(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}


// Node values straight from the flow definition.
inline Vec BruteNodeValues(const DecisionProblem& p, const Vec& x) {
  Vec v(p.num_nodes(), 0.0);
  for (int s = p.num_nodes() - 1; s >= 0; --s) {
    const Node& n = p.node(s);
    if (n.kind == NodeKind::kTerminal) {
      v[s] = x[n.terminal];
    } else if (n.kind == NodeKind::kDecision) {
      for (int c : n.children) v[s] += v[c];
    } else {
      v[s] = v[n.children.front()];
    }
  }
  return v;
}

// beta(x) as a map from pure strategy to probability: every action
// assignment, weighted by the product of local action probabilities at
// reached decision points (lowest action at unreached ones).
inline std::map<Vec, double> BruteBeta(const DecisionProblem& p, const Vec& x) {
  const Vec nv = BruteNodeValues(p, x);
  const auto& dps = p.decision_points();
  std::vector<int> choice(dps.size(), 0);
  std::map<Vec, double> out;
  for (;;) {
    double prob = 1.0;
    for (std::size_t j = 0; j < dps.size(); ++j) {
      const Node& n = p.node(dps[j]);
      if (nv[dps[j]] > 0.0) {
        prob *= nv[n.children[choice[j]]] / nv[dps[j]];
      } else if (choice[j] != 0) {
        prob = 0.0;
      }
    }
    if (prob > 0.0) {
      Vec y(p.num_terminals(), 0.0);
      for (int z = 0; z < p.num_terminals(); ++z) {
        int s = p.terminal_node(z);
        bool reached = true;
        while (p.node(s).parent >= 0) {
          const int par = p.node(s).parent;
          if (p.node(par).kind == NodeKind::kDecision) {
            const int j = static_cast<int>(
                std::find(dps.begin(), dps.end(), par) - dps.begin());
            if (p.node(par).children[choice[j]] != s) reached = false;
          }
          s = par;
        }
        y[z] = reached ? 1.0 : 0.0;
      }
      out[y] += prob;
    }
    std::size_t j = 0;
    for (; j < dps.size(); ++j) {
      if (++choice[j] < static_cast<int>(p.node(dps[j]).children.size())) break;
      choice[j] = 0;
    }
    if (j == dps.size()) break;
  }
  return out;
}

// Random point of the polytope: a random convex combination of the given
// pure strategies, sometimes sparse so that some decision points go
// unreached.
inline Vec RandomPoint(const std::vector<Vec>& pure, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Vec w(pure.size());
  double total = 0.0;
  for (double& v : w) {
    v = coin(rng) < 0.3 ? 0.0 : expo(rng);
    total += v;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  Vec x(pure.front().size(), 0.0);
  for (std::size_t i = 0; i < pure.size(); ++i) {
    for (std::size_t z = 0; z < x.size(); ++z) x[z] += w[i] / total * pure[i][z];
  }
  return x;
}

inline Vec RandomPoint(const DecisionProblem& p, std::mt19937_64& rng) {
  return RandomPoint(BrutePureStrategies(p), rng);
}

// All subsets of {0..n-1} of size at most k.
inline std::vector<std::vector<int>> SmallSubsets(int n, int k) {
  std::vector<std::vector<int>> out = {{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(out[i].size()) == k) continue;
    const int from = out[i].empty() ? 0 : out[i].back() + 1;
    for (int z = from; z < n; ++z) {
      auto s = out[i];
      s.push_back(z);
      out.push_back(std::move(s));
    }
  }
  return out;
}


// phi(x) = (x1 + x3, x2 x4, x2 x5, x2, 0) on the two-level example. It maps
// pure strategies into the strategy set, but its plain extension does not
// preserve the polytope.
inline PolynomialDeviation Fig1Counterexample() {
  PolynomialDeviation phi(5, 5);
  phi.AddTerm(0, 1.0, {0});
  phi.AddTerm(0, 1.0, {2});
  phi.AddTerm(1, 1.0, {1, 3});
  phi.AddTerm(2, 1.0, {1, 4});
  phi.AddTerm(3, 1.0, {1});
  return phi;
}

// A pure two-mediator policy realizing Fig1Counterexample. Mediator 1 is
// steered to B and its recommendations at A and B decide the move at A.
// Mediator 2 is steered to C, and its recommendation there decides the move
// at B.
inline ReducedStrategy Fig1CounterexamplePolicy(const DeviationDag& dag,
                                                const DecisionProblem& fig1) {
  const int O = fig1.NodeByLabel("O"), A = fig1.NodeByLabel("A"),
            B = fig1.NodeByLabel("B"), C = fig1.NodeByLabel("C"),
            x1 = fig1.NodeByLabel("x1"), x2 = fig1.NodeByLabel("x2"),
            x3 = fig1.NodeByLabel("x3"), x4 = fig1.NodeByLabel("x4"),
            x5 = fig1.NodeByLabel("x5");
  return PolicyStrategy(dag, [&](int state) {
    const auto edges = dag.out_edges(state);
    const auto& tup = dag.label(state);
    auto pick = [&](int component, int node) {
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].component == component && edges[i].node == node) {
          return static_cast<int>(i);
        }
      }
      return -1;
    };
    auto first = [](std::initializer_list<int> options) {
      for (int o : options) {
        if (o >= 0) return o;
      }
      return 0;
    };
    const int s = tup[0], m1 = tup[1], m2 = tup[2];
    if (s == A) {
      if (m1 == O) return first({pick(1, B)});
      if (m1 == x1 || m1 == x3) return first({pick(0, x1)});
      return first({pick(0, O)});
    }
    if (s == C) return first({pick(0, x4)});
    if (s == B) {
      if (m2 == O) return first({pick(2, C)});
      if (m2 == x5) return first({pick(0, x3)});
      return first({pick(0, x2)});
    }
    (void)x2;
    return 0;
  });
}


// A uniformly random pure state policy, drawn once per state.
inline ReducedStrategy RandomPolicy(const DeviationDag& dag, std::mt19937_64& rng) {
  std::vector<int> choice(dag.num_states(), 0);
  for (int st = 0; st < dag.num_states(); ++st) {
    const int deg = static_cast<int>(dag.out_edges(st).size());
    if (deg > 0) choice[st] = std::uniform_int_distribution<int>(0, deg - 1)(rng);
  }
  return PolicyStrategy(dag, [&](int st) { return choice[st]; });
}

inline ReducedStrategy RandomMixedPolicy(const DeviationDag& dag,
                                         std::mt19937_64& rng, int parts) {
  std::vector<ReducedStrategy> ps;
  Vec w;
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (int i = 0; i < parts; ++i) {
    ps.push_back(RandomPolicy(dag, rng));
    w.push_back(expo(rng));
    total += w.back();
  }
  for (double& v : w) v /= total;
  return MixStrategies(ps, w);
}

// Random deviation of degree at most 2: a mixture of random pure
// two-mediator strategies.
inline PolynomialDeviation RandomDegree2Deviation(const DeviationDag& dag2,
                                                  std::mt19937_64& rng) {
  const ReducedStrategy q = RandomMixedPolicy(dag2, rng, 3);
  return ToPolynomial(dag2, q.terminal);
}

}  // namespace phireg::testing

#endif  // PHIREG_TESTS_FIXTURES_H_
