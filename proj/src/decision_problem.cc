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

#include "phireg/decision_problem.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace phireg {
namespace {

constexpr std::int64_t kSaturated = std::numeric_limits<std::int64_t>::max();

std::int64_t SatAdd(std::int64_t a, std::int64_t b) {
  return (a > kSaturated - b) ? kSaturated : a + b;
}

std::int64_t SatMul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return (a > kSaturated / b) ? kSaturated : a * b;
}

std::string Where(const RawNode& r) {
  return r.line > 0 ? "line " + std::to_string(r.line) + ": " : "";
}

NodeKind ParseKind(std::string_view token, int line) {
  if (token == "D") return NodeKind::kDecision;
  if (token == "O") return NodeKind::kObservation;
  if (token == "T") return NodeKind::kTerminal;
  throw PhiregError("line " + std::to_string(line) + ": unknown node kind '" +
                    std::string(token) + "' (expected D, O or T)");
}

bool IsIdentifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (static_cast<unsigned char>(c) <= 32 || static_cast<unsigned char>(c) > 126) {
      return false;
    }
  }
  return true;
}

// Mutable tree used while validating and repairing.
struct WorkTree {
  std::vector<RawNode> raw;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  int root = -1;
};

PureResponse ExtremeResponse(const DecisionProblem& problem,
                             std::span<const double> u, bool maximize) {
  if (static_cast<int>(u.size()) != problem.num_terminals()) {
    throw PhiregError("BestPureResponse: utility has " +
                      std::to_string(u.size()) + " entries, expected " +
                      std::to_string(problem.num_terminals()));
  }
  const auto& nodes = problem.nodes();
  Vec value(nodes.size(), 0.0);
  std::vector<int> choice(nodes.size(), -1);
  for (int s = problem.num_nodes() - 1; s >= 0; --s) {
    const Node& n = nodes[s];
    switch (n.kind) {
      case NodeKind::kTerminal:
        value[s] = u[n.terminal];
        break;
      case NodeKind::kObservation: {
        double v = 0.0;
        for (int c : n.children) v += value[c];
        value[s] = v;
        break;
      }
      case NodeKind::kDecision: {
        int best = n.children.front();
        for (int c : n.children) {
          if (maximize ? value[c] > value[best] : value[c] < value[best]) {
            best = c;
          }
        }
        choice[s] = best;
        value[s] = value[best];
        break;
      }
    }
  }
  PureResponse out;
  out.strategy.assign(problem.num_terminals(), 0.0);
  out.value = value[problem.root()];
  std::vector<int> stack = {problem.root()};
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    const Node& n = nodes[s];
    if (n.kind == NodeKind::kTerminal) {
      out.strategy[n.terminal] = 1.0;
    } else if (n.kind == NodeKind::kObservation) {
      for (int c : n.children) stack.push_back(c);
    } else {
      stack.push_back(choice[s]);
    }
  }
  return out;
}

}  // namespace

char KindChar(NodeKind kind) {
  switch (kind) {
    case NodeKind::kDecision:
      return 'D';
    case NodeKind::kObservation:
      return 'O';
    case NodeKind::kTerminal:
      return 'T';
  }
  return '?';
}

DecisionProblem DecisionProblem::Build(std::string name,
                                       std::vector<RawNode> raw,
                                       BuildOptions options) {
  if (raw.empty()) throw PhiregError("decision problem has no nodes");
  WorkTree t;
  t.raw = std::move(raw);
  const int n = static_cast<int>(t.raw.size());
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < n; ++i) {
    if (!index.emplace(t.raw[i].id, i).second) {
      throw PhiregError(Where(t.raw[i]) + "duplicate node id '" +
                        t.raw[i].id + "'");
    }
  }
  t.parent.assign(n, -1);
  t.children.assign(n, {});
  for (int i = 0; i < n; ++i) {
    const RawNode& r = t.raw[i];
    if (r.parent.empty()) {
      if (t.root >= 0) {
        throw PhiregError(Where(r) + "second root '" + r.id + "' (first is '" +
                          t.raw[t.root].id + "')");
      }
      t.root = i;
      continue;
    }
    auto it = index.find(r.parent);
    if (it == index.end()) {
      throw PhiregError(Where(r) + "unknown parent '" + r.parent + "' of '" +
                        r.id + "'");
    }
    t.parent[i] = it->second;
    t.children[it->second].push_back(i);
  }
  if (t.root < 0) throw PhiregError("no root node (every node has a parent)");

  // Every node has one parent, so anything unreachable from the root sits on
  // a cycle.
  {
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {t.root};
    seen[t.root] = 1;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      for (int c : t.children[s]) {
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!seen[i]) {
        throw PhiregError(Where(t.raw[i]) + "cycle: node '" + t.raw[i].id +
                          "' is not reachable from the root");
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    const RawNode& r = t.raw[i];
    const auto deg = t.children[i].size();
    if (r.kind == NodeKind::kTerminal && deg > 0) {
      throw PhiregError(Where(r) + "terminal node '" + r.id + "' has children");
    }
    if (r.kind != NodeKind::kTerminal && deg == 0) {
      throw PhiregError(Where(r) + "internal node '" + r.id +
                        "' has no children");
    }
    if (options.require_branching && r.kind == NodeKind::kDecision &&
        deg < 2) {
      throw PhiregError(Where(r) + "decision point '" + r.id + "' has " +
                        std::to_string(deg) +
                        " action(s); at least 2 are required");
    }
  }
  if (t.raw[t.root].kind == NodeKind::kTerminal) {
    throw PhiregError("the root may not be a terminal node");
  }

  DecisionProblem p;
  p.name_ = std::move(name);

  if (options.repair_alternation) {
    // Splice observation -> observation edges, then insert dummy observation
    // points on decision -> decision edges. Work top-down so spliced
    // grandchildren are revisited.
    std::vector<int> stack = {t.root};
    int dummy_count = 0;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      const NodeKind kind = t.raw[s].kind;
      if (kind == NodeKind::kObservation) {
        bool changed = true;
        while (changed) {
          changed = false;
          std::vector<int> next;
          for (int c : t.children[s]) {
            if (t.raw[c].kind == NodeKind::kObservation) {
              p.log_.push_back("spliced observation point '" + t.raw[c].id +
                               "' into its parent '" + t.raw[s].id + "'");
              for (int g : t.children[c]) {
                t.parent[g] = s;
                next.push_back(g);
              }
              t.children[c].clear();
              t.parent[c] = -2;  // detached
              changed = true;
            } else {
              next.push_back(c);
            }
          }
          t.children[s] = std::move(next);
        }
      } else if (kind == NodeKind::kDecision) {
        std::vector<int> next = t.children[s];
        for (int& c : next) {
          if (t.raw[c].kind != NodeKind::kDecision) continue;
          RawNode dummy;
          dummy.id = "~obs" + std::to_string(dummy_count++);
          while (index.count(dummy.id)) dummy.id += "_";
          dummy.kind = NodeKind::kObservation;
          dummy.parent = t.raw[s].id;
          dummy.action = t.raw[c].action;
          const int d = static_cast<int>(t.raw.size());
          p.log_.push_back("inserted observation point '" + dummy.id +
                           "' between decision points '" + t.raw[s].id +
                           "' and '" + t.raw[c].id + "'");
          t.raw.push_back(std::move(dummy));
          index.emplace(t.raw.back().id, d);
          t.parent.push_back(s);
          t.children.push_back({c});
          t.parent[c] = d;
          t.raw[c].action = "-";
          c = d;
        }
        t.children[s] = std::move(next);
      }
      for (int c : t.children[s]) stack.push_back(c);
    }
  }

  // Breadth-first re-indexing.
  std::vector<int> order;
  std::vector<int> new_index(t.raw.size(), -1);
  {
    std::deque<int> queue = {t.root};
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      new_index[s] = static_cast<int>(order.size());
      order.push_back(s);
      for (int c : t.children[s]) queue.push_back(c);
    }
  }
  p.nodes_.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int s = order[k];
    Node& node = p.nodes_[k];
    node.kind = t.raw[s].kind;
    node.id = t.raw[s].id;
    node.action = (s == t.root) ? "" : t.raw[s].action;
    node.parent = (s == t.root) ? -1 : new_index[t.parent[s]];
    for (int c : t.children[s]) node.children.push_back(new_index[c]);
    if (node.kind == NodeKind::kTerminal) {
      node.terminal = static_cast<int>(p.terminals_.size());
      p.terminals_.push_back(static_cast<int>(k));
    }
    if (node.kind == NodeKind::kDecision) {
      p.decisions_.push_back(static_cast<int>(k));
    }
    if (node.parent >= 0) {
      const Node& par = p.nodes_[node.parent];
      node.decision_depth =
          par.decision_depth + (par.kind == NodeKind::kDecision ? 1 : 0);
    }
    if (node.kind == NodeKind::kTerminal) {
      p.depth_ = std::max(p.depth_, node.decision_depth);
    }
  }
  return p;
}

int DecisionProblem::NodeByLabel(std::string_view id) const {
  for (int s = 0; s < num_nodes(); ++s) {
    if (nodes_[s].id == id) return s;
  }
  throw PhiregError("no node with id '" + std::string(id) + "'");
}

int DecisionProblem::TerminalByLabel(std::string_view id) const {
  const int s = NodeByLabel(id);
  if (nodes_[s].terminal < 0) {
    throw PhiregError("node '" + std::string(id) + "' is not terminal");
  }
  return nodes_[s].terminal;
}

Vec DecisionProblem::NodeValues(std::span<const double> terminal_values) const {
  if (static_cast<int>(terminal_values.size()) != num_terminals()) {
    throw PhiregError("NodeValues: got " +
                      std::to_string(terminal_values.size()) +
                      " terminal values, expected " +
                      std::to_string(num_terminals()));
  }
  Vec v(nodes_.size(), 0.0);
  for (int s = num_nodes() - 1; s >= 0; --s) {
    const Node& n = nodes_[s];
    if (n.kind == NodeKind::kTerminal) {
      v[s] = terminal_values[n.terminal];
    } else if (n.kind == NodeKind::kObservation) {
      v[s] = v[n.children.front()];
    } else {
      double sum = 0.0;
      for (int c : n.children) sum += v[c];
      v[s] = sum;
    }
  }
  return v;
}

bool DecisionProblem::IsBinary() const {
  for (int j : decisions_) {
    if (nodes_[j].children.size() != 2) return false;
  }
  return true;
}

std::vector<RawNode> DecisionProblem::ToRaw() const {
  std::vector<RawNode> raw;
  raw.reserve(nodes_.size());
  for (const Node& n : nodes_) {
    RawNode r;
    r.id = n.id;
    r.kind = n.kind;
    r.parent = n.parent >= 0 ? nodes_[n.parent].id : "";
    r.action = n.parent >= 0 ? n.action : "";
    raw.push_back(std::move(r));
  }
  return raw;
}

DecisionProblem ParseProblemLines(std::span<const std::string> lines,
                                  int first_line) {
  std::string name;
  bool have_header = false;
  std::vector<RawNode> raw;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = first_line + static_cast<int>(i);
    std::string line = lines[i];
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream in(line);
    std::vector<std::string> tok;
    for (std::string w; in >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok[0] != "tfsdp" || tok.size() != 2) {
        throw PhiregError("line " + std::to_string(line_no) +
                          ": expected header 'tfsdp <name>'");
      }
      name = tok[1];
      have_header = true;
      continue;
    }
    if (tok.size() != 4) {
      throw PhiregError("line " + std::to_string(line_no) +
                        ": expected '<id> <D|O|T> <parent|-> <action|->', got " +
                        std::to_string(tok.size()) + " field(s)");
    }
    if (!IsIdentifier(tok[0])) {
      throw PhiregError("line " + std::to_string(line_no) + ": bad node id");
    }
    RawNode r;
    r.id = tok[0];
    r.kind = ParseKind(tok[1], line_no);
    r.parent = tok[2] == "-" ? "" : tok[2];
    r.action = tok[3];
    r.line = line_no;
    if (r.parent.empty() && r.action != "-") {
      throw PhiregError("line " + std::to_string(line_no) +
                        ": the root cannot carry an action label");
    }
    raw.push_back(std::move(r));
  }
  if (!have_header) throw PhiregError("missing 'tfsdp <name>' header");
  return DecisionProblem::Build(name, std::move(raw));
}

DecisionProblem ParseProblem(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return ParseProblemLines(lines, 1);
}

std::string FormatProblem(const DecisionProblem& problem) {
  std::ostringstream out;
  out << "tfsdp " << (problem.name().empty() ? "unnamed" : problem.name())
      << "\n";
  for (const Node& n : problem.nodes()) {
    out << n.id << ' ' << KindChar(n.kind) << ' '
        << (n.parent >= 0 ? problem.node(n.parent).id : "-") << ' '
        << (n.parent >= 0 && !n.action.empty() ? n.action : "-") << "\n";
  }
  return out.str();
}

std::int64_t CountPureStrategies(const DecisionProblem& problem) {
  const auto& nodes = problem.nodes();
  std::vector<std::int64_t> count(nodes.size(), 1);
  for (int s = problem.num_nodes() - 1; s >= 0; --s) {
    const Node& n = nodes[s];
    if (n.kind == NodeKind::kDecision) {
      std::int64_t c = 0;
      for (int ch : n.children) c = SatAdd(c, count[ch]);
      count[s] = c;
    } else if (n.kind == NodeKind::kObservation) {
      std::int64_t c = 1;
      for (int ch : n.children) c = SatMul(c, count[ch]);
      count[s] = c;
    }
  }
  return count[problem.root()];
}

std::vector<Vec> EnumeratePureStrategies(const DecisionProblem& problem,
                                         std::int64_t cap) {
  const std::int64_t total = CountPureStrategies(problem);
  if (total > cap) {
    throw CapExceeded("EnumeratePureStrategies: " + std::to_string(total) +
                      " pure strategies exceed the cap of " +
                      std::to_string(cap));
  }
  using Support = std::vector<int>;  // terminals set to 1
  std::function<std::vector<Support>(int)> rec = [&](int s) {
    const Node& n = problem.node(s);
    if (n.kind == NodeKind::kTerminal) return std::vector<Support>{{n.terminal}};
    if (n.kind == NodeKind::kDecision) {
      std::vector<Support> out;
      for (int c : n.children) {
        auto sub = rec(c);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    std::vector<Support> acc = {{}};
    for (int c : n.children) {
      const auto sub = rec(c);
      std::vector<Support> next;
      next.reserve(acc.size() * sub.size());
      for (const auto& a : acc) {
        for (const auto& b : sub) {
          Support m = a;
          m.insert(m.end(), b.begin(), b.end());
          next.push_back(std::move(m));
        }
      }
      acc = std::move(next);
    }
    return acc;
  };
  std::vector<Vec> out;
  for (const auto& support : rec(problem.root())) {
    Vec x(problem.num_terminals(), 0.0);
    for (int z : support) x[z] = 1.0;
    out.push_back(std::move(x));
  }
  return out;
}

bool Membership(const DecisionProblem& problem, std::span<const double> v,
                double tol) {
  if (static_cast<int>(v.size()) != problem.num_terminals()) {
    throw PhiregError("Membership: vector has " + std::to_string(v.size()) +
                      " entries, expected " +
                      std::to_string(problem.num_terminals()));
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) return false;
  }
  const Vec values = problem.NodeValues(v);
  if (std::abs(values[problem.root()] - 1.0) > tol) return false;
  for (const Node& n : problem.nodes()) {
    if (n.kind != NodeKind::kObservation) continue;
    const double first = values[n.children.front()];
    for (int c : n.children) {
      if (std::abs(values[c] - first) > tol) return false;
    }
  }
  return true;
}

PureResponse BestPureResponse(const DecisionProblem& problem,
                              std::span<const double> u) {
  return ExtremeResponse(problem, u, /*maximize=*/true);
}

PureResponse WorstPureResponse(const DecisionProblem& problem,
                               std::span<const double> u) {
  return ExtremeResponse(problem, u, /*maximize=*/false);
}

UtilityVector NormalizeUtility(const DecisionProblem& problem,
                               std::span<const double> raw) {
  for (double r : raw) {
    if (!std::isfinite(r)) throw PhiregError("NormalizeUtility: non-finite entry");
  }
  const double hi = BestPureResponse(problem, raw).value;
  const double lo = WorstPureResponse(problem, raw).value;
  const double m = std::max(std::abs(hi), std::abs(lo));
  UtilityVector u;
  u.payoffs.assign(raw.begin(), raw.end());
  if (m == 0.0) return u;
  for (double& p : u.payoffs) p /= m;
  u.scale = m;
  return u;
}

BinarizedProblem Binarize(const DecisionProblem& problem) {
  if (problem.IsBinary()) {
    BinarizedProblem b{problem, {}};
    b.to_original.resize(problem.num_terminals());
    for (int z = 0; z < problem.num_terminals(); ++z) b.to_original[z] = z;
    return b;
  }
  std::vector<RawNode> raw;
  int fresh = 0;
  std::unordered_map<std::string, int> taken;
  for (const Node& n : problem.nodes()) taken.emplace(n.id, 0);
  auto fresh_id = [&](const std::string& base) {
    std::string id;
    do {
      id = base + "~b" + std::to_string(fresh++);
    } while (taken.count(id));
    taken.emplace(id, 0);
    return id;
  };
  // Emit original nodes, rerouting children of wide decision points through
  // a balanced cascade.
  std::function<void(const std::string&, std::span<const int>)> cascade =
      [&](const std::string& parent_id, std::span<const int> kids) {
        if (kids.size() == 1) return;  // caller attaches directly
        const std::size_t left = (kids.size() + 1) / 2;
        const std::span<const int> halves[2] = {kids.subspan(0, left),
                                                kids.subspan(left)};
        for (int h = 0; h < 2; ++h) {
          if (halves[h].size() == 1) {
            const Node& c = problem.node(halves[h][0]);
            raw.push_back({c.id, c.kind, parent_id, c.action, 0});
          } else {
            RawNode mid;
            mid.id = fresh_id(parent_id);
            mid.kind = NodeKind::kDecision;
            mid.parent = parent_id;
            mid.action = h == 0 ? "<" : ">";
            raw.push_back(mid);
            cascade(mid.id, halves[h]);
          }
        }
      };
  std::function<void(int)> emit = [&](int s) {
    const Node& n = problem.node(s);
    if (n.kind == NodeKind::kDecision && n.children.size() > 2) {
      cascade(n.id, n.children);
    } else {
      for (int c : n.children) {
        const Node& ch = problem.node(c);
        raw.push_back({ch.id, ch.kind, n.id, ch.action, 0});
      }
    }
    for (int c : n.children) emit(c);
  };
  const Node& root = problem.node(problem.root());
  raw.push_back({root.id, root.kind, "", "", 0});
  emit(problem.root());

  BinarizedProblem b;
  b.problem = DecisionProblem::Build(problem.name(), std::move(raw));
  b.to_original.resize(b.problem.num_terminals());
  for (int z = 0; z < b.problem.num_terminals(); ++z) {
    b.to_original[z] =
        problem.TerminalByLabel(b.problem.node(b.problem.terminal_node(z)).id);
  }
  return b;
}

Vec ToOriginalIndexing(const BinarizedProblem& b, std::span<const double> v) {
  if (v.size() != b.to_original.size()) {
    throw PhiregError("ToOriginalIndexing: dimension mismatch");
  }
  Vec out(v.size(), 0.0);
  for (std::size_t z = 0; z < v.size(); ++z) out[b.to_original[z]] = v[z];
  return out;
}

DecisionProblem Dual(const DecisionProblem& problem) {
  auto raw = problem.ToRaw();
  for (RawNode& r : raw) {
    if (r.kind == NodeKind::kDecision) {
      r.kind = NodeKind::kObservation;
    } else if (r.kind == NodeKind::kObservation) {
      r.kind = NodeKind::kDecision;
    }
  }
  // Single-child observation points become forced decisions; keep the tree
  // exactly so that terminal indexing matches.
  DecisionProblem::BuildOptions opts;
  opts.require_branching = false;
  opts.repair_alternation = false;
  return DecisionProblem::Build(problem.name(), std::move(raw), opts);
}

DecisionProblem HypercubeProblem(int n) {
  if (n < 1) throw PhiregError("HypercubeProblem: need n >= 1");
  std::vector<RawNode> raw;
  raw.push_back({"r", NodeKind::kObservation, "", "", 0});
  for (int j = 0; j < n; ++j) {
    raw.push_back({"d" + std::to_string(j), NodeKind::kDecision, "r",
                   std::to_string(j), 0});
  }
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < 2; ++a) {
      raw.push_back({"z" + std::to_string(j) + "_" + std::to_string(a),
                     NodeKind::kTerminal, "d" + std::to_string(j),
                     std::to_string(a), 0});
    }
  }
  return DecisionProblem::Build("hypercube" + std::to_string(n), std::move(raw));
}

bool IsHypercube(const DecisionProblem& problem, int* n) {
  const Node& root = problem.node(problem.root());
  if (root.kind != NodeKind::kObservation) return false;
  const int m = static_cast<int>(root.children.size());
  if (problem.num_terminals() != 2 * m) return false;
  for (int j = 0; j < m; ++j) {
    const Node& d = problem.node(root.children[j]);
    if (d.kind != NodeKind::kDecision || d.children.size() != 2) return false;
    for (int a = 0; a < 2; ++a) {
      const Node& z = problem.node(d.children[a]);
      if (z.kind != NodeKind::kTerminal || z.terminal != 2 * j + a) return false;
    }
  }
  if (n != nullptr) *n = m;
  return true;
}

Vec UniformBehavioralPoint(const DecisionProblem& problem) {
  Vec reach(problem.num_nodes(), 0.0);
  reach[problem.root()] = 1.0;
  Vec x(problem.num_terminals(), 0.0);
  for (int s = 0; s < problem.num_nodes(); ++s) {
    const Node& n = problem.node(s);
    if (n.kind == NodeKind::kTerminal) {
      x[n.terminal] = reach[s];
      continue;
    }
    const double share =
        n.kind == NodeKind::kDecision ? reach[s] / n.children.size() : reach[s];
    for (int c : n.children) reach[c] = share;
  }
  return x;
}

}  // namespace phireg
