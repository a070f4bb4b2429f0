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

#include "phireg/polynomial.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phireg {
namespace {

// Scalar multilinear polynomial with Boolean reduction.
using Poly = std::map<Monomial, double>;

Monomial Union(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

Poly Multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) out[Union(ma, mb)] += ca * cb;
  }
  return out;
}

void AddScaled(Poly& acc, const Poly& p, double scale) {
  for (const auto& [m, c] : p) acc[m] += scale * c;
}

void PrunePoly(Poly& p, double tol) {
  for (auto it = p.begin(); it != p.end();) {
    it = std::abs(it->second) <= tol ? p.erase(it) : std::next(it);
  }
}

constexpr double kDropTolerance = 1e-12;

}  // namespace

PolynomialDeviation::PolynomialDeviation(int num_inputs, int num_outputs)
    : num_inputs_(num_inputs), num_outputs_(num_outputs) {
  if (num_inputs < 0 || num_outputs < 0) {
    throw PhiregError("PolynomialDeviation: negative dimension");
  }
}

PolynomialDeviation PolynomialDeviation::Identity(int n) {
  PolynomialDeviation phi(n, n);
  for (int z = 0; z < n; ++z) phi.AddTerm(z, 1.0, {z});
  return phi;
}

PolynomialDeviation PolynomialDeviation::Constant(
    std::span<const double> value) {
  const int n = static_cast<int>(value.size());
  PolynomialDeviation phi(n, n);
  for (int z = 0; z < n; ++z) {
    if (value[z] != 0.0) phi.AddTerm(z, value[z], {});
  }
  return phi;
}

void PolynomialDeviation::AddTerm(int output, double coef,
                                  std::vector<int> monomial) {
  if (output < 0 || output >= num_outputs_) {
    throw PhiregError("AddTerm: output " + std::to_string(output) +
                      " out of range");
  }
  std::sort(monomial.begin(), monomial.end());
  monomial.erase(std::unique(monomial.begin(), monomial.end()),
                 monomial.end());
  for (int z : monomial) {
    if (z < 0 || z >= num_inputs_) {
      throw PhiregError("AddTerm: input " + std::to_string(z) +
                        " out of range");
    }
  }
  auto [it, inserted] =
      index_.emplace(monomial, static_cast<int>(monomials_.size()));
  if (inserted) {
    monomials_.push_back(std::move(monomial));
    uses_.emplace_back();
  }
  auto& uses = uses_[it->second];
  for (Use& u : uses) {
    if (u.output == output) {
      u.coef += coef;
      return;
    }
  }
  uses.push_back({output, coef});
}

void PolynomialDeviation::Prune(double tol) {
  PolynomialDeviation out(num_inputs_, num_outputs_);
  for (std::size_t m = 0; m < monomials_.size(); ++m) {
    for (const Use& u : uses_[m]) {
      if (std::abs(u.coef) > tol) out.AddTerm(u.output, u.coef, monomials_[m]);
    }
  }
  *this = std::move(out);
}

std::vector<std::pair<Monomial, double>> PolynomialDeviation::Terms(
    int output) const {
  std::vector<std::pair<Monomial, double>> out;
  for (const auto& [m, idx] : index_) {
    for (const Use& u : uses_[idx]) {
      if (u.output == output) out.emplace_back(m, u.coef);
    }
  }
  return out;
}

int PolynomialDeviation::Degree() const {
  int d = 0;
  for (std::size_t m = 0; m < monomials_.size(); ++m) {
    bool live = false;
    for (const Use& u : uses_[m]) live = live || u.coef != 0.0;
    if (live) d = std::max(d, static_cast<int>(monomials_[m].size()));
  }
  return d;
}

std::size_t PolynomialDeviation::num_terms() const {
  std::size_t n = 0;
  for (const auto& u : uses_) n += u.size();
  return n;
}

Vec PolynomialDeviation::Evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_inputs_) {
    throw PhiregError("PolynomialDeviation::Evaluate: expected " +
                      std::to_string(num_inputs_) + " inputs, got " +
                      std::to_string(x.size()));
  }
  Vec out(num_outputs_, 0.0);
  for (std::size_t m = 0; m < monomials_.size(); ++m) {
    double prod = 1.0;
    for (int z : monomials_[m]) prod *= x[z];
    if (prod == 0.0) continue;
    for (const Use& u : uses_[m]) out[u.output] += u.coef * prod;
  }
  return out;
}

std::string PolynomialDeviation::DebugString() const {
  std::ostringstream os;
  for (int z = 0; z < num_outputs_; ++z) {
    os << "[" << z << "] =";
    const auto terms = Terms(z);
    if (terms.empty()) os << " 0";
    for (const auto& [m, c] : terms) {
      os << " " << (c < 0 ? "- " : "+ ") << std::abs(c);
      for (int v : m) os << "*x" << v;
    }
    os << "\n";
  }
  return os.str();
}

void ValidateDeviation(const DecisionProblem& problem,
                       const PolynomialDeviation& phi, std::int64_t cap) {
  const int n = problem.num_terminals();
  if (phi.num_inputs() != n || phi.num_outputs() != n) {
    throw InvalidDeviation("deviation dimensions do not match the problem");
  }
  for (const Vec& x : EnumeratePureStrategies(problem, cap)) {
    if (!Membership(problem, phi.Evaluate(x))) {
      std::string bits;
      for (double v : x) bits += v > 0.5 ? '1' : '0';
      throw InvalidDeviation("deviation maps pure strategy " + bits +
                             " outside the strategy polytope");
    }
  }
}

bool IsValidDeviation(const DecisionProblem& problem,
                      const PolynomialDeviation& phi, std::int64_t cap) {
  try {
    ValidateDeviation(problem, phi, cap);
  } catch (const InvalidDeviation&) {
    return false;
  }
  return true;
}

Vec ExtendedMapEvalBeta(const DecisionProblem& problem,
                        const PolynomialDeviation& phi,
                        std::span<const double> node_values) {
  Vec out(phi.num_outputs(), 0.0);
  const auto& monomials = phi.monomials();
  for (std::size_t m = 0; m < monomials.size(); ++m) {
    const double e = MonomialExpectationBeta(problem, node_values, monomials[m]);
    if (e == 0.0) continue;
    for (const auto& u : phi.uses()[m]) out[u.output] += u.coef * e;
  }
  return out;
}

Vec ExtendedMapEval(const DecisionProblem& problem,
                    const PolynomialDeviation& phi, std::span<const double> x,
                    StrategyMap map) {
  if (map == StrategyMap::kBehavioral) {
    return ExtendedMapEvalBeta(problem, phi, problem.NodeValues(x));
  }
  Vec out(phi.num_outputs(), 0.0);
  for (const SupportAtom& atom : Caratheodory(problem, x)) {
    const Vec y = phi.Evaluate(atom.strategy);
    for (int z = 0; z < phi.num_outputs(); ++z) out[z] += atom.weight * y[z];
  }
  return out;
}

Vec MixtureImage(const DecisionProblem& problem,
                 const PolynomialDeviation& phi, const Mixture& mixture) {
  Vec out(phi.num_outputs(), 0.0);
  for (const auto& c : mixture.components) {
    const Vec y = mixture.map == StrategyMap::kBehavioral
                      ? ExtendedMapEvalBeta(problem, phi, c.node_values)
                      : phi.Evaluate(c.point);
    for (int z = 0; z < phi.num_outputs(); ++z) out[z] += c.weight * y[z];
  }
  return out;
}

PolynomialDeviation Compose(const PolynomialDeviation& f,
                            const PolynomialDeviation& g) {
  if (f.num_inputs() != g.num_outputs()) {
    throw PhiregError("Compose: inner outputs do not match outer inputs");
  }
  std::vector<Poly> coord(g.num_outputs());
  for (std::size_t m = 0; m < g.monomials().size(); ++m) {
    for (const auto& u : g.uses()[m]) coord[u.output][g.monomials()[m]] += u.coef;
  }
  std::vector<Poly> out(f.num_outputs());
  for (std::size_t m = 0; m < f.monomials().size(); ++m) {
    Poly prod = {{Monomial{}, 1.0}};
    for (int v : f.monomials()[m]) {
      prod = Multiply(prod, coord[v]);
      PrunePoly(prod, kDropTolerance);
    }
    for (const auto& u : f.uses()[m]) AddScaled(out[u.output], prod, u.coef);
  }
  PolynomialDeviation h(g.num_inputs(), f.num_outputs());
  for (int z = 0; z < f.num_outputs(); ++z) {
    PrunePoly(out[z], kDropTolerance);
    for (const auto& [m, c] : out[z]) h.AddTerm(z, c, m);
  }
  return h;
}

PolynomialDeviation ExtendIdentity(const DecisionProblem& problem) {
  if (!problem.IsBinary()) {
    throw PhiregError(
        "ExtendIdentity: every decision point needs exactly two actions "
        "(binarize first)");
  }
  const int num_nodes = problem.num_nodes();
  // Linear form reading the node value of s off the terminal coordinates.
  std::vector<Poly> form(num_nodes);
  for (int s = num_nodes - 1; s >= 0; --s) {
    const Node& n = problem.node(s);
    if (n.kind == NodeKind::kTerminal) {
      form[s] = {{Monomial{n.terminal}, 1.0}};
    } else if (n.kind == NodeKind::kObservation) {
      form[s] = form[n.children.front()];
    } else {
      form[s] = form[n.children[0]];
      AddScaled(form[s], form[n.children[1]], 1.0);
    }
  }
  std::vector<Poly> ext(num_nodes);
  ext[problem.root()] = {{Monomial{}, 1.0}};
  // Breadth-first indexing puts parents before children.
  for (int s = 0; s < num_nodes; ++s) {
    const Node& n = problem.node(s);
    if (n.kind == NodeKind::kObservation) {
      for (int c : n.children) ext[c] = ext[s];
    } else if (n.kind == NodeKind::kDecision) {
      const Poly& left = form[n.children[0]];
      Poly one_minus = {{Monomial{}, 1.0}};
      AddScaled(one_minus, left, -1.0);
      ext[n.children[0]] = Multiply(left, ext[s]);
      ext[n.children[1]] = Multiply(one_minus, ext[s]);
      PrunePoly(ext[n.children[0]], kDropTolerance);
      PrunePoly(ext[n.children[1]], kDropTolerance);
    }
  }
  const int n = problem.num_terminals();
  PolynomialDeviation id(n, n);
  for (int z = 0; z < n; ++z) {
    for (const auto& [m, c] : ext[problem.terminal_node(z)]) id.AddTerm(z, c, m);
  }
  return id;
}

PolynomialDeviation ExtendPolynomial(const DecisionProblem& problem,
                                     const PolynomialDeviation& f) {
  return Compose(f, ExtendIdentity(problem));
}

}  // namespace phireg
