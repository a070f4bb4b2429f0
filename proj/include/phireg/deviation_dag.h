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

#ifndef PHIREG_DEVIATION_DAG_H_
#define PHIREG_DEVIATION_DAG_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"
#include "phireg/polynomial.h"
#include "phireg/strategy_maps.h"

namespace phireg {

// The decision problem faced by a deviator, with histories collapsed into
// states. Two families share this representation:
//
//  * decision-tree problems on a hypercube (a tree, so no collapsing), and
//  * interleavings of a base problem with k copies of its dual, where the
//    deviator plays the base problem while querying k mediators.
//
// Each terminal state t carries an output base terminal and a set of base
// terminals it reads, so a reduced strategy q acts on x as
//
//   phi_q(x)[z] = sum_{t : output(t) = z} q[t] * prod_{r in reads(t)} x[r].
class DeviationDag {
 public:
  enum class Family { kDecisionTree, kInterleaving };

  struct Edge {
    // Interleaving decision edges: the component that moves and its new node.
    // Interleaving observation edges: component -1, node -1.
    // Decision-tree edges: component 0 and the chosen index or reply.
    int component = 0;
    int node = 0;
    int child = 0;  // target state
  };

  Family family() const { return family_; }
  int k() const { return k_; }
  int num_base_terminals() const { return num_base_terminals_; }
  const std::string& name() const { return name_; }

  int num_states() const { return static_cast<int>(kinds_.size()); }
  int root() const { return 0; }
  NodeKind kind(int s) const { return kinds_[s]; }
  // Interleaving: node tuple (s, s_1, ..., s_k). Decision tree: the history
  // (j0, j1, a1, ..., ji, ai[, a0]) so far.
  const std::vector<int>& label(int s) const { return labels_[s]; }

  std::span<const Edge> out_edges(int s) const {
    return {edges_.data() + offsets_[s],
            static_cast<std::size_t>(offsets_[s + 1] - offsets_[s])};
  }
  int edge_offset(int s) const { return offsets_[s]; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int e) const { return edges_[e]; }

  int num_terminals() const { return static_cast<int>(terminal_states_.size()); }
  int terminal_state(int t) const { return terminal_states_[t]; }
  // Terminal index of state s, or -1.
  int terminal_of(int s) const { return terminal_of_[s]; }
  int output(int t) const { return outputs_[t]; }
  const Monomial& reads(int t) const { return read_sets_[read_id_[t]]; }
  // Distinct read sets, so expectations can be shared across terminals.
  const std::vector<Monomial>& read_sets() const { return read_sets_; }
  int read_id(int t) const { return read_id_[t]; }

  // One line per state: `id kind label <- parent ids`.
  std::string Dump() const;

  // Low-level constructor used by the builders: states must be given in a
  // topological order with the root first.
  struct StateSpec {
    NodeKind kind = NodeKind::kTerminal;
    std::vector<int> label;
    std::vector<Edge> edges;
    int output = -1;
    Monomial reads;
  };
  DeviationDag(Family family, std::string name, int k, int num_base_terminals,
               std::vector<StateSpec> states);
  DeviationDag() = default;

 private:
  Family family_ = Family::kDecisionTree;
  std::string name_;
  int k_ = 0;
  int num_base_terminals_ = 0;
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<int>> labels_;
  std::vector<int> offsets_;
  std::vector<Edge> edges_;
  std::vector<int> terminal_states_;
  std::vector<int> terminal_of_;
  std::vector<int> outputs_;
  std::vector<int> read_id_;
  std::vector<Monomial> read_sets_;
};

// Depth-k decision-tree deviations over {0,1}^n, expressed on
// HypercubeProblem(n). The deviator observes j0, adaptively queries k
// coordinates and then picks the bit to play at j0. With `distinct`, the k
// queried coordinates are pairwise distinct and k is clamped to n.
DeviationDag BuildDtProblem(int n, int k, bool distinct = false,
                            std::int64_t cap = kDefaultEnumerationCap);

// The interleaving of `base` with k copies of its dual.
DeviationDag Interleave(const DecisionProblem& base, int k,
                        std::int64_t cap = kDefaultEnumerationCap);

// Parses `external`, `dt:K`, `dtd:K` (distinct queries) or `med:K`.
struct DeviationSpec {
  enum class Kind { kDecisionTree, kMediator } kind = Kind::kMediator;
  int k = 0;
  bool distinct = false;
  std::string ToString() const;
};
DeviationSpec ParseDeviationSpec(const std::string& text);
DeviationDag BuildDeviationDag(const DecisionProblem& base,
                               const DeviationSpec& spec,
                               std::int64_t cap = kDefaultEnumerationCap);

// A point of the reduced-strategy polytope: terminal-state values plus the
// flow on every edge.
struct ReducedStrategy {
  Vec terminal;
  Vec edge_flow;
};

// Checks nonnegativity, unit root outflow, copy at observation states and
// conservation at decision states.
bool ValidateFlow(const DeviationDag& dag, const ReducedStrategy& q,
                  double tol = kFlowTolerance, std::string* why = nullptr);

// Builds the reduced strategy of a pure state-based policy. `choose` is asked
// at every reached decision state and returns an index into out_edges(s).
ReducedStrategy PolicyStrategy(const DeviationDag& dag,
                               const std::function<int(int)>& choose);

// Convex combination of reduced strategies.
ReducedStrategy MixStrategies(std::span<const ReducedStrategy> parts,
                              std::span<const double> weights);

// The k >= 1 interleaving strategy that plays whatever the first mediator
// recommends, giving phi_q = identity on pure strategies.
ReducedStrategy FollowMediatorStrategy(const DeviationDag& dag,
                                       const DecisionProblem& base);

// phi_q(x) for any real x (the naive polynomial evaluation).
Vec EvalDeviation(const DeviationDag& dag, std::span<const double> q,
                  std::span<const double> x);

// Decision-tree case on bit vectors: returns phi_q(x)[j] = P(play 1 at j),
// evaluated as the multilinear polynomial in the bits.
Vec EvalDtDeviation(const DeviationDag& dag, std::span<const double> q,
                    std::span<const double> bits);

// Bits to the hypercube tree-form vector and back.
Vec BitsToHypercube(std::span<const double> bits);
Vec HypercubeToBits(std::span<const double> x);

PolynomialDeviation ToPolynomial(const DeviationDag& dag,
                                 std::span<const double> q);

// W[t] = u[output(t)] * E_{x ~ pi}[prod_{r in reads(t)} x[r]], so that
// <W, q> = <u, E_{x ~ pi} phi_q(x)> for every reduced strategy q.
Vec TerminalWeights(const DeviationDag& dag, const DecisionProblem& base,
                    std::span<const double> u, const Mixture& pi);

struct BestReduced {
  double value = 0.0;
  ReducedStrategy strategy;
};

// Backward induction over the DAG; ties go to the lowest edge.
BestReduced BestReducedStrategy(const DeviationDag& dag,
                                std::span<const double> w);

}  // namespace phireg

#endif  // PHIREG_DEVIATION_DAG_H_
