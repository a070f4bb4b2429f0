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

#ifndef PHIREG_NORM_H_
#define PHIREG_NORM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"

namespace phireg {

// Induced norm ||v||_X = max { <u, v> : |<u, x>| <= 1 for every pure x }.
//
// Desk-scale oracle: enumerates the pure strategies and solves the equivalent
// gauge program min { sum |c_p| : sum c_p x_p = v }. Both optimal sides are
// returned so callers can verify the value independently.
struct InducedNorm {
  double value = 0.0;  // +inf when v is outside the span of the strategies
  std::vector<Vec> pure_strategies;
  Vec coefficients;  // c_p, one per pure strategy
  Vec certificate;   // maximizing utility vector u
};

InducedNorm ComputeInducedNorm(const DecisionProblem& problem,
                               std::span<const double> v,
                               std::int64_t cap = kDefaultEnumerationCap);

double XNorm(const DecisionProblem& problem, std::span<const double> v,
             std::int64_t cap = kDefaultEnumerationCap);

// Euclidean diameter of the pure strategy set.
double EuclideanDiameter(const DecisionProblem& problem,
                         std::int64_t cap = kDefaultEnumerationCap);

}  // namespace phireg

#endif  // PHIREG_NORM_H_
