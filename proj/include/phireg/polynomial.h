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

#ifndef PHIREG_POLYNOMIAL_H_
#define PHIREG_POLYNOMIAL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"
#include "phireg/strategy_maps.h"

namespace phireg {

// Sorted set of input terminal indices. The empty monomial is the constant 1.
using Monomial = std::vector<int>;

// On a hypercube problem the literal x[j, a] is terminal 2j + a, so
// x[j, 1] = x_j and x[j, 0] = 1 - x_j on pure strategies.
inline int HypercubeLiteral(int j, int a) { return 2 * j + a; }

// A multilinear map from terminal vectors to terminal vectors. Inputs are
// taken on {0,1} points, so x[z]^2 is reduced to x[z] and monomials are sets.
class PolynomialDeviation {
 public:
  struct Use {
    int output = 0;
    double coef = 0.0;
  };

  PolynomialDeviation() = default;
  PolynomialDeviation(int num_inputs, int num_outputs);

  static PolynomialDeviation Identity(int n);
  static PolynomialDeviation Constant(std::span<const double> value);

  int num_inputs() const { return num_inputs_; }
  int num_outputs() const { return num_outputs_; }

  // Adds coef * prod_{z in monomial} x[z] to output coordinate `output`.
  // Repeated indices collapse; like terms merge.
  void AddTerm(int output, double coef, std::vector<int> monomial);

  // Drops terms whose |coef| <= tol.
  void Prune(double tol);

  const std::vector<Monomial>& monomials() const { return monomials_; }
  const std::vector<std::vector<Use>>& uses() const { return uses_; }

  // Terms of one output coordinate, ordered by monomial.
  std::vector<std::pair<Monomial, double>> Terms(int output) const;

  int Degree() const;
  std::size_t num_terms() const;

  // Plain polynomial evaluation at any real vector.
  Vec Evaluate(std::span<const double> x) const;

  std::string DebugString() const;

 private:
  int num_inputs_ = 0;
  int num_outputs_ = 0;
  std::vector<Monomial> monomials_;
  std::vector<std::vector<Use>> uses_;  // parallel to monomials_
  std::map<Monomial, int> index_;
};

// Checks that phi maps every pure strategy of `problem` into its polytope.
// Throws InvalidDeviation naming the first offending input.
void ValidateDeviation(const DecisionProblem& problem,
                       const PolynomialDeviation& phi,
                       std::int64_t cap = kDefaultEnumerationCap);
bool IsValidDeviation(const DecisionProblem& problem,
                      const PolynomialDeviation& phi,
                      std::int64_t cap = kDefaultEnumerationCap);

// E_{x' ~ delta(x)} phi(x'). The behavioral case never expands beta(x); it
// takes one monomial expectation per distinct monomial.
Vec ExtendedMapEval(const DecisionProblem& problem,
                    const PolynomialDeviation& phi, std::span<const double> x,
                    StrategyMap map);

// Same, with node values of x already at hand (behavioral only).
Vec ExtendedMapEvalBeta(const DecisionProblem& problem,
                        const PolynomialDeviation& phi,
                        std::span<const double> node_values);

// E_{x ~ mixture} phi(x).
Vec MixtureImage(const DecisionProblem& problem,
                 const PolynomialDeviation& phi, const Mixture& mixture);

// f o g, where g's outputs feed f's inputs.
PolynomialDeviation Compose(const PolynomialDeviation& f,
                            const PolynomialDeviation& g);

// A polynomial map on {0,1}^N of degree at most depth(problem) that agrees
// with the identity on the pure strategies. Requires binary branching.
PolynomialDeviation ExtendIdentity(const DecisionProblem& problem);

// f o ExtendIdentity(problem): defined on all of {0,1}^N.
PolynomialDeviation ExtendPolynomial(const DecisionProblem& problem,
                                     const PolynomialDeviation& f);

}  // namespace phireg

#endif  // PHIREG_POLYNOMIAL_H_
