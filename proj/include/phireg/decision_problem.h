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

#ifndef PHIREG_DECISION_PROBLEM_H_
#define PHIREG_DECISION_PROBLEM_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phireg/common.h"

namespace phireg {

enum class NodeKind { kDecision, kObservation, kTerminal };

char KindChar(NodeKind kind);

struct Node {
  NodeKind kind = NodeKind::kTerminal;
  int parent = -1;
  std::vector<int> children;
  std::string id;
  // Label of the edge from the parent; empty at the root.
  std::string action;
  // Dense terminal index, or -1 for internal nodes.
  int terminal = -1;
  // Number of decision points strictly above this node.
  int decision_depth = 0;
};

// One line of the game-file format, before validation.
struct RawNode {
  std::string id;
  NodeKind kind = NodeKind::kTerminal;
  std::string parent;  // empty for the root
  std::string action;  // empty for the root
  int line = 0;        // source line, 0 if synthesized
};

// A tree-form sequential decision problem.
//
// Nodes are stored breadth-first from the root (node 0). Terminal nodes are
// densely re-indexed 0..N-1 in the same order, so a tree-form strategy is a
// vector over terminals. Instances are immutable after Build().
class DecisionProblem {
 public:
  struct BuildOptions {
    // Every decision point must have at least two actions.
    bool require_branching = true;
    // Insert dummy observation points between consecutive decision points and
    // splice consecutive observation points. When false the tree is kept
    // as-is.
    bool repair_alternation = true;
  };

  DecisionProblem() = default;

  static DecisionProblem Build(std::string name, std::vector<RawNode> raw,
                               BuildOptions options);
  static DecisionProblem Build(std::string name, std::vector<RawNode> raw) {
    return Build(std::move(name), std::move(raw), BuildOptions{});
  }

  const std::string& name() const { return name_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int s) const { return nodes_[s]; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int root() const { return 0; }
  int num_terminals() const { return static_cast<int>(terminals_.size()); }
  // Node index of terminal z.
  int terminal_node(int z) const { return terminals_[z]; }
  // Max number of decision points on a root-to-terminal path.
  int depth() const { return depth_; }
  const std::vector<int>& decision_points() const { return decisions_; }
  // Repairs applied during validation, one human-readable entry each.
  const std::vector<std::string>& transform_log() const { return log_; }

  // Terminal index for a node id; throws if the id is not a terminal.
  int TerminalByLabel(std::string_view id) const;
  int NodeByLabel(std::string_view id) const;

  // Extends a terminal vector to all nodes: decision points sum their
  // children, observation points copy their first child.
  Vec NodeValues(std::span<const double> terminal_values) const;

  // True when every decision point has exactly two actions.
  bool IsBinary() const;

  // Raw nodes in storage order; feeding them back to Build reproduces the
  // problem.
  std::vector<RawNode> ToRaw() const;

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<int> terminals_;
  std::vector<int> decisions_;
  std::vector<std::string> log_;
  int depth_ = 0;
};

// Parses the line-oriented game-file format:
//   tfsdp <name>
//   <id> <D|O|T> <parent-id|-> <action-label|->
// Blank lines and '#' comments are ignored.
DecisionProblem ParseProblem(std::string_view text);
// Same, over a pre-split block of lines; `first_line` numbers the first one.
DecisionProblem ParseProblemLines(std::span<const std::string> lines,
                                  int first_line);
std::string FormatProblem(const DecisionProblem& problem);

// Number of distinct tree-form pure strategies, saturating at INT64_MAX.
std::int64_t CountPureStrategies(const DecisionProblem& problem);

// All distinct tree-form pure strategies as 0/1 vectors.
std::vector<Vec> EnumeratePureStrategies(
    const DecisionProblem& problem,
    std::int64_t cap = kDefaultEnumerationCap);

// Whether v lies in the convex hull of the pure strategies, i.e. satisfies
// the sequence-form flow equations within `tol`.
bool Membership(const DecisionProblem& problem, std::span<const double> v,
                double tol = kFlowTolerance);

struct UtilityVector {
  Vec payoffs;
  double scale = 1.0;  // raw = payoffs * scale
};

// Rescales raw so that |<u, x>| <= 1 over all pure strategies x.
UtilityVector NormalizeUtility(const DecisionProblem& problem,
                               std::span<const double> raw);

struct PureResponse {
  Vec strategy;
  double value = 0.0;
};

// argmax over pure strategies of <u, x>, ties toward the lowest child.
PureResponse BestPureResponse(const DecisionProblem& problem,
                              std::span<const double> u);
// argmin counterpart, same tie-break.
PureResponse WorstPureResponse(const DecisionProblem& problem,
                               std::span<const double> u);

struct BinarizedProblem {
  DecisionProblem problem;
  // new terminal index -> original terminal index
  std::vector<int> to_original;
};

// Replaces every decision point with b > 2 actions by a balanced cascade of
// binary decision points.
BinarizedProblem Binarize(const DecisionProblem& problem);

// Swaps decision and observation points. Terminal indexing is preserved.
DecisionProblem Dual(const DecisionProblem& problem);

// {0,1}^n as a decision problem: a root observation point with n binary
// decision points. Terminal 2*j + a is "coordinate j takes value a".
DecisionProblem HypercubeProblem(int n);

// Whether `problem` has the HypercubeProblem shape; writes n on success.
bool IsHypercube(const DecisionProblem& problem, int* n = nullptr);

// Sequence-form point of the behavioral strategy that is uniform at every
// decision point.
Vec UniformBehavioralPoint(const DecisionProblem& problem);

// Permutes a vector over terminals of `problem` into the original indexing
// of a binarization.
Vec ToOriginalIndexing(const BinarizedProblem& b, std::span<const double> v);

}  // namespace phireg

#endif  // PHIREG_DECISION_PROBLEM_H_
