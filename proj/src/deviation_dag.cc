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

#include "phireg/deviation_dag.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace phireg {

DeviationDag::DeviationDag(Family family, std::string name, int k,
                           int num_base_terminals,
                           std::vector<StateSpec> states)
    : family_(family),
      name_(std::move(name)),
      k_(k),
      num_base_terminals_(num_base_terminals) {
  const int n = static_cast<int>(states.size());
  if (n == 0) throw PhiregError("DeviationDag: no states");
  kinds_.reserve(n);
  labels_.reserve(n);
  offsets_.assign(1, 0);
  terminal_of_.assign(n, -1);
  std::map<Monomial, int> read_index;
  for (int s = 0; s < n; ++s) {
    StateSpec& spec = states[s];
    kinds_.push_back(spec.kind);
    labels_.push_back(std::move(spec.label));
    for (const Edge& e : spec.edges) {
      if (e.child <= s || e.child >= n) {
        throw PhiregError("DeviationDag: states are not topologically ordered");
      }
      edges_.push_back(e);
    }
    offsets_.push_back(static_cast<int>(edges_.size()));
    if (spec.kind == NodeKind::kTerminal) {
      if (!spec.edges.empty()) {
        throw PhiregError("DeviationDag: terminal state with edges");
      }
      if (spec.output < 0 || spec.output >= num_base_terminals) {
        throw PhiregError("DeviationDag: terminal output out of range");
      }
      terminal_of_[s] = static_cast<int>(terminal_states_.size());
      terminal_states_.push_back(s);
      outputs_.push_back(spec.output);
      auto [it, inserted] = read_index.emplace(
          spec.reads, static_cast<int>(read_sets_.size()));
      if (inserted) read_sets_.push_back(spec.reads);
      read_id_.push_back(it->second);
    } else if (spec.edges.empty()) {
      throw PhiregError("DeviationDag: internal state without edges");
    }
  }
}

std::string DeviationDag::Dump() const {
  std::vector<std::vector<int>> parents(num_states());
  for (int s = 0; s < num_states(); ++s) {
    for (const Edge& e : out_edges(s)) parents[e.child].push_back(s);
  }
  std::ostringstream os;
  for (int s = 0; s < num_states(); ++s) {
    os << s << " " << KindChar(kinds_[s]) << " (";
    for (std::size_t i = 0; i < labels_[s].size(); ++i) {
      os << (i ? "," : "") << labels_[s][i];
    }
    os << ") <-";
    for (int p : parents[s]) os << " " << p;
    os << "\n";
  }
  return os.str();
}

DeviationDag BuildDtProblem(int n, int k, bool distinct, std::int64_t cap) {
  if (n < 1) throw PhiregError("BuildDtProblem: need n >= 1");
  if (k < 0) throw PhiregError("BuildDtProblem: need k >= 0");
  if (distinct) k = std::min(k, n);
  double terminals = 2.0 * n;
  for (int i = 0; i < k; ++i) terminals *= 2.0 * (distinct ? n - i : n);
  if (terminals > static_cast<double>(cap)) {
    throw CapExceeded("BuildDtProblem: " + std::to_string(terminals) +
                      " terminals exceed the cap of " + std::to_string(cap));
  }

  using Spec = DeviationDag::StateSpec;
  std::vector<Spec> states;
  auto add = [&](NodeKind kind, std::vector<int> label) {
    Spec spec;
    spec.kind = kind;
    spec.label = std::move(label);
    states.push_back(std::move(spec));
    return static_cast<int>(states.size()) - 1;
  };
  auto link = [&](int s, int value, int child) {
    states[s].edges.push_back({0, value, child});
  };

  // label = (j0, j1, a1, ..., ji, ai)
  std::function<int(const std::vector<int>&, int)> query =
      [&](const std::vector<int>& label, int i) -> int {
    const int s = add(NodeKind::kDecision, label);
    if (i > k) {
      for (int a0 = 0; a0 < 2; ++a0) {
        std::vector<int> full = label;
        full.push_back(a0);
        const int t = add(NodeKind::kTerminal, full);
        states[t].output = HypercubeLiteral(label[0], a0);
        for (std::size_t p = 1; p + 1 < label.size(); p += 2) {
          states[t].reads.push_back(HypercubeLiteral(label[p], label[p + 1]));
        }
        std::sort(states[t].reads.begin(), states[t].reads.end());
        states[t].reads.erase(
            std::unique(states[t].reads.begin(), states[t].reads.end()),
            states[t].reads.end());
        link(s, a0, t);
      }
      return s;
    }
    for (int j = 0; j < n; ++j) {
      if (distinct) {
        bool used = false;
        for (std::size_t p = 1; p < label.size(); p += 2) {
          used = used || label[p] == j;
        }
        if (used) continue;
      }
      std::vector<int> asked = label;
      asked.push_back(j);
      const int o = add(NodeKind::kObservation, asked);
      for (int a = 0; a < 2; ++a) {
        std::vector<int> replied = asked;
        replied.push_back(a);
        link(o, a, query(replied, i + 1));
      }
      link(s, j, o);
    }
    return s;
  };

  const int root = add(NodeKind::kObservation, {});
  for (int j0 = 0; j0 < n; ++j0) link(root, j0, query({j0}, 1));
  std::string name = "dt" + std::string(distinct ? "d" : "") + ":" +
                     std::to_string(k) + " on hypercube" + std::to_string(n);
  return DeviationDag(DeviationDag::Family::kDecisionTree, std::move(name), k,
                      2 * n, std::move(states));
}

namespace {

NodeKind ComponentKind(const DecisionProblem& base, int component, int node) {
  const NodeKind kind = base.node(node).kind;
  if (component == 0 || kind == NodeKind::kTerminal) return kind;
  return kind == NodeKind::kDecision ? NodeKind::kObservation
                                     : NodeKind::kDecision;
}

}  // namespace

DeviationDag Interleave(const DecisionProblem& base, int k, std::int64_t cap) {
  if (k < 0) throw PhiregError("Interleave: need k >= 0");
  const int m = base.num_nodes();
  if ((k + 1) * std::log2(static_cast<double>(m) + 1.0) > 62.0) {
    throw CapExceeded("Interleave: state tuples do not fit a 64-bit key");
  }
  std::vector<int> depth(m, 0);
  for (int s = 1; s < m; ++s) depth[s] = depth[base.node(s).parent] + 1;

  auto key_of = [&](const std::vector<int>& tuple) {
    std::uint64_t key = 0;
    for (int i = k; i >= 0; --i) key = key * m + tuple[i];
    return key;
  };

  struct Raw {
    std::vector<int> tuple;
    NodeKind kind = NodeKind::kTerminal;
    std::vector<DeviationDag::Edge> edges;  // child holds a discovery index
    int depth_sum = 0;
  };
  std::vector<Raw> raw;
  std::unordered_map<std::uint64_t, int> index;
  auto intern = [&](std::vector<int> tuple) {
    const std::uint64_t key = key_of(tuple);
    auto [it, inserted] = index.emplace(key, static_cast<int>(raw.size()));
    if (inserted) {
      if (static_cast<std::int64_t>(raw.size()) >= cap) {
        throw CapExceeded("Interleave: more than " + std::to_string(cap) +
                          " states");
      }
      Raw r;
      r.depth_sum = 0;
      for (int v : tuple) r.depth_sum += depth[v];
      r.tuple = std::move(tuple);
      raw.push_back(std::move(r));
    }
    return it->second;
  };

  intern(std::vector<int>(k + 1, base.root()));
  for (std::size_t cur = 0; cur < raw.size(); ++cur) {
    const std::vector<int> tuple = raw[cur].tuple;
    std::vector<int> observing;
    bool all_terminal = true;
    for (int i = 0; i <= k; ++i) {
      const NodeKind kind = ComponentKind(base, i, tuple[i]);
      if (kind != NodeKind::kTerminal) all_terminal = false;
      if (kind == NodeKind::kObservation) observing.push_back(i);
    }
    std::vector<DeviationDag::Edge> edges;
    NodeKind kind;
    if (all_terminal) {
      kind = NodeKind::kTerminal;
    } else if (!observing.empty()) {
      // Every observing component reveals at once.
      kind = NodeKind::kObservation;
      std::vector<int> next = tuple;
      std::function<void(std::size_t)> product = [&](std::size_t p) {
        if (p == observing.size()) {
          edges.push_back({-1, -1, intern(next)});
          return;
        }
        const int comp = observing[p];
        for (int c : base.node(tuple[comp]).children) {
          next[comp] = c;
          product(p + 1);
        }
        next[comp] = tuple[comp];
      };
      product(0);
    } else {
      kind = NodeKind::kDecision;
      for (int i = 0; i <= k; ++i) {
        if (ComponentKind(base, i, tuple[i]) != NodeKind::kDecision) continue;
        for (int c : base.node(tuple[i]).children) {
          std::vector<int> next = tuple;
          next[i] = c;
          edges.push_back({i, c, intern(std::move(next))});
        }
      }
    }
    raw[cur].kind = kind;
    raw[cur].edges = std::move(edges);
  }

  // Every edge advances one component by one level, so sorting by the total
  // depth gives a topological order.
  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return raw[a].depth_sum < raw[b].depth_sum;
  });
  std::vector<int> rank(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::vector<DeviationDag::StateSpec> states;
  states.reserve(raw.size());
  for (int id : order) {
    Raw& r = raw[id];
    DeviationDag::StateSpec spec;
    spec.kind = r.kind;
    spec.edges = r.edges;
    for (auto& e : spec.edges) e.child = rank[e.child];
    if (r.kind == NodeKind::kTerminal) {
      spec.output = base.node(r.tuple[0]).terminal;
      for (int i = 1; i <= k; ++i) {
        spec.reads.push_back(base.node(r.tuple[i]).terminal);
      }
      std::sort(spec.reads.begin(), spec.reads.end());
      spec.reads.erase(std::unique(spec.reads.begin(), spec.reads.end()),
                       spec.reads.end());
    }
    spec.label = std::move(r.tuple);
    states.push_back(std::move(spec));
  }
  return DeviationDag(DeviationDag::Family::kInterleaving,
                      "med:" + std::to_string(k) + " on " + base.name(), k,
                      base.num_terminals(), std::move(states));
}

std::string DeviationSpec::ToString() const {
  if (kind == Kind::kMediator) {
    return k == 0 ? "external" : "med:" + std::to_string(k);
  }
  return (distinct ? "dtd:" : "dt:") + std::to_string(k);
}

DeviationSpec ParseDeviationSpec(const std::string& text) {
  DeviationSpec spec;
  if (text == "external") return spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw PhiregError("bad deviation set '" + text +
                      "' (expected external, dt:K, dtd:K or med:K)");
  }
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  if (head == "dt" || head == "dtd") {
    spec.kind = DeviationSpec::Kind::kDecisionTree;
    spec.distinct = head == "dtd";
  } else if (head != "med") {
    throw PhiregError("bad deviation set '" + text + "'");
  }
  std::size_t used = 0;
  try {
    spec.k = std::stoi(tail, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tail.size() || spec.k < 0) {
    throw PhiregError("bad deviation depth in '" + text + "'");
  }
  return spec;
}

DeviationDag BuildDeviationDag(const DecisionProblem& base,
                               const DeviationSpec& spec, std::int64_t cap) {
  if (spec.kind == DeviationSpec::Kind::kMediator) {
    return Interleave(base, spec.k, cap);
  }
  int n = 0;
  if (!IsHypercube(base, &n)) {
    throw PhiregError(
        "decision-tree deviations need a hypercube problem (root observation "
        "over binary decisions)");
  }
  return BuildDtProblem(n, spec.k, spec.distinct, cap);
}

bool ValidateFlow(const DeviationDag& dag, const ReducedStrategy& q, double tol,
                  std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  if (static_cast<int>(q.terminal.size()) != dag.num_terminals() ||
      static_cast<int>(q.edge_flow.size()) != dag.num_edges()) {
    return fail("dimension mismatch");
  }
  Vec inflow(dag.num_states(), 0.0);
  inflow[dag.root()] = 1.0;
  for (int s = 0; s < dag.num_states(); ++s) {
    const int base = dag.edge_offset(s);
    const auto edges = dag.out_edges(s);
    double sum = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double f = q.edge_flow[base + i];
      if (f < -tol) return fail("negative flow out of state " + std::to_string(s));
      if (dag.kind(s) == NodeKind::kObservation &&
          std::abs(f - inflow[s]) > tol) {
        return fail("observation state " + std::to_string(s) +
                    " does not copy its inflow");
      }
      sum += f;
      inflow[edges[i].child] += f;
    }
    if (dag.kind(s) == NodeKind::kDecision && std::abs(sum - inflow[s]) > tol) {
      return fail("decision state " + std::to_string(s) + " leaks flow");
    }
    if (dag.kind(s) == NodeKind::kTerminal &&
        std::abs(q.terminal[dag.terminal_of(s)] - inflow[s]) > tol) {
      return fail("terminal " + std::to_string(dag.terminal_of(s)) +
                  " disagrees with its inflow");
    }
  }
  return true;
}

ReducedStrategy PolicyStrategy(const DeviationDag& dag,
                               const std::function<int(int)>& choose) {
  ReducedStrategy q;
  q.terminal.assign(dag.num_terminals(), 0.0);
  q.edge_flow.assign(dag.num_edges(), 0.0);
  Vec mass(dag.num_states(), 0.0);
  mass[dag.root()] = 1.0;
  for (int s = 0; s < dag.num_states(); ++s) {
    if (mass[s] == 0.0) continue;
    const auto edges = dag.out_edges(s);
    const int base = dag.edge_offset(s);
    switch (dag.kind(s)) {
      case NodeKind::kTerminal:
        q.terminal[dag.terminal_of(s)] = mass[s];
        break;
      case NodeKind::kObservation:
        for (std::size_t i = 0; i < edges.size(); ++i) {
          q.edge_flow[base + i] = mass[s];
          mass[edges[i].child] += mass[s];
        }
        break;
      case NodeKind::kDecision: {
        const int i = choose(s);
        if (i < 0 || i >= static_cast<int>(edges.size())) {
          throw PhiregError("PolicyStrategy: edge choice out of range at state " +
                            std::to_string(s));
        }
        q.edge_flow[base + i] = mass[s];
        mass[edges[i].child] += mass[s];
        break;
      }
    }
  }
  return q;
}

ReducedStrategy MixStrategies(std::span<const ReducedStrategy> parts,
                              std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw PhiregError("MixStrategies: need one weight per part");
  }
  ReducedStrategy out;
  out.terminal.assign(parts[0].terminal.size(), 0.0);
  out.edge_flow.assign(parts[0].edge_flow.size(), 0.0);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (std::size_t i = 0; i < out.terminal.size(); ++i) {
      out.terminal[i] += weights[p] * parts[p].terminal[i];
    }
    for (std::size_t i = 0; i < out.edge_flow.size(); ++i) {
      out.edge_flow[i] += weights[p] * parts[p].edge_flow[i];
    }
  }
  return out;
}

namespace {

// Child of `ancestor` on the path to `node`, or -1 if `ancestor` is not a
// proper ancestor of `node`.
int StepToward(const DecisionProblem& base, int ancestor, int node) {
  for (int s = node; s >= 0; s = base.node(s).parent) {
    if (base.node(s).parent == ancestor) return s;
  }
  return -1;
}

}  // namespace

ReducedStrategy FollowMediatorStrategy(const DeviationDag& dag,
                                       const DecisionProblem& base) {
  if (dag.family() != DeviationDag::Family::kInterleaving || dag.k() < 1) {
    throw PhiregError("FollowMediatorStrategy: needs an interleaving with k >= 1");
  }
  auto find = [&](int s, int component, int node) {
    const auto edges = dag.out_edges(s);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].component == component && edges[i].node == node) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  return PolicyStrategy(dag, [&](int s) {
    const auto& tuple = dag.label(s);
    const int x = tuple[0];
    const int med = tuple[1];
    if (base.node(x).kind == NodeKind::kDecision) {
      const int step = StepToward(base, x, med);
      if (step >= 0) {
        const int e = find(s, 0, step);
        if (e >= 0) return e;
      }
    }
    if (base.node(med).kind == NodeKind::kObservation) {
      const int step = StepToward(base, med, x);
      if (step >= 0) {
        const int e = find(s, 1, step);
        if (e >= 0) return e;
      }
    }
    const auto edges = dag.out_edges(s);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].component >= 2) return static_cast<int>(i);
    }
    return 0;
  });
}

Vec EvalDeviation(const DeviationDag& dag, std::span<const double> q,
                  std::span<const double> x) {
  if (static_cast<int>(q.size()) != dag.num_terminals()) {
    throw PhiregError("EvalDeviation: reduced strategy has the wrong size");
  }
  if (static_cast<int>(x.size()) != dag.num_base_terminals()) {
    throw PhiregError("EvalDeviation: expected " +
                      std::to_string(dag.num_base_terminals()) +
                      " coordinates, got " + std::to_string(x.size()));
  }
  Vec out(dag.num_base_terminals(), 0.0);
  for (int t = 0; t < dag.num_terminals(); ++t) {
    if (q[t] == 0.0) continue;
    double prod = q[t];
    for (int r : dag.reads(t)) prod *= x[r];
    out[dag.output(t)] += prod;
  }
  return out;
}

Vec BitsToHypercube(std::span<const double> bits) {
  Vec x(2 * bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    x[2 * j] = 1.0 - bits[j];
    x[2 * j + 1] = bits[j];
  }
  return x;
}

Vec HypercubeToBits(std::span<const double> x) {
  Vec bits(x.size() / 2);
  for (std::size_t j = 0; j < bits.size(); ++j) bits[j] = x[2 * j + 1];
  return bits;
}

Vec EvalDtDeviation(const DeviationDag& dag, std::span<const double> q,
                    std::span<const double> bits) {
  if (dag.family() != DeviationDag::Family::kDecisionTree) {
    throw PhiregError("EvalDtDeviation: not a decision-tree problem");
  }
  if (2 * static_cast<int>(bits.size()) != dag.num_base_terminals()) {
    throw PhiregError("EvalDtDeviation: dimension mismatch");
  }
  if (static_cast<int>(q.size()) != dag.num_terminals()) {
    throw PhiregError("EvalDtDeviation: reduced strategy has the wrong size");
  }
  // Multilinear form in the bits: a path that reads both literals of one
  // coordinate contributes x (1 - x), which is 0 on every bit vector.
  const Vec x = BitsToHypercube(bits);
  Vec out(bits.size(), 0.0);
  for (int t = 0; t < dag.num_terminals(); ++t) {
    const int z = dag.output(t);
    if (q[t] == 0.0 || z % 2 == 0) continue;
    const Monomial& reads = dag.reads(t);
    double prod = q[t];
    for (std::size_t i = 0; i < reads.size(); ++i) {
      if (i + 1 < reads.size() && reads[i] / 2 == reads[i + 1] / 2) {
        prod = 0.0;
        break;
      }
      prod *= x[reads[i]];
    }
    out[z / 2] += prod;
  }
  return out;
}

PolynomialDeviation ToPolynomial(const DeviationDag& dag,
                                 std::span<const double> q) {
  const int n = dag.num_base_terminals();
  PolynomialDeviation phi(n, n);
  for (int t = 0; t < dag.num_terminals(); ++t) {
    if (q[t] != 0.0) phi.AddTerm(dag.output(t), q[t], dag.reads(t));
  }
  return phi;
}

Vec TerminalWeights(const DeviationDag& dag, const DecisionProblem& base,
                    std::span<const double> u, const Mixture& pi) {
  if (static_cast<int>(u.size()) != dag.num_base_terminals()) {
    throw PhiregError("TerminalWeights: utility has the wrong size");
  }
  const auto& sets = dag.read_sets();
  Vec expect(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    expect[i] = pi.MonomialExpectation(base, sets[i]);
  }
  Vec w(dag.num_terminals());
  for (int t = 0; t < dag.num_terminals(); ++t) {
    w[t] = u[dag.output(t)] * expect[dag.read_id(t)];
  }
  return w;
}

BestReduced BestReducedStrategy(const DeviationDag& dag,
                                std::span<const double> w) {
  if (static_cast<int>(w.size()) != dag.num_terminals()) {
    throw PhiregError("BestReducedStrategy: weight vector has the wrong size");
  }
  Vec value(dag.num_states(), 0.0);
  std::vector<int> best(dag.num_states(), -1);
  for (int s = dag.num_states() - 1; s >= 0; --s) {
    const auto edges = dag.out_edges(s);
    switch (dag.kind(s)) {
      case NodeKind::kTerminal:
        value[s] = w[dag.terminal_of(s)];
        break;
      case NodeKind::kObservation:
        for (const auto& e : edges) value[s] += value[e.child];
        break;
      case NodeKind::kDecision:
        for (std::size_t i = 0; i < edges.size(); ++i) {
          if (best[s] < 0 || value[edges[i].child] > value[s]) {
            best[s] = static_cast<int>(i);
            value[s] = value[edges[i].child];
          }
        }
        break;
    }
  }
  BestReduced out;
  out.value = value[dag.root()];
  out.strategy = PolicyStrategy(dag, [&](int s) { return best[s]; });
  return out;
}

}  // namespace phireg
