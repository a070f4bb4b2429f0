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

#include "phireg/norm.h"

#include <cmath>
#include <limits>

#include "phireg/lp.h"

namespace phireg {

InducedNorm ComputeInducedNorm(const DecisionProblem& problem,
                               std::span<const double> v, std::int64_t cap) {
  const int n = problem.num_terminals();
  if (static_cast<int>(v.size()) != n) {
    throw PhiregError("XNorm: vector has " + std::to_string(v.size()) +
                      " entries, expected " + std::to_string(n));
  }
  InducedNorm out;
  out.pure_strategies = EnumeratePureStrategies(problem, cap);
  const int p = static_cast<int>(out.pure_strategies.size());

  // Columns: +x_p then -x_p, each at unit cost.
  lp::Problem lp;
  lp.a.assign(n, Vec(2 * p, 0.0));
  lp.b.assign(v.begin(), v.end());
  lp.c.assign(2 * p, 1.0);
  for (int k = 0; k < p; ++k) {
    for (int z = 0; z < n; ++z) {
      lp.a[z][k] = out.pure_strategies[k][z];
      lp.a[z][p + k] = -out.pure_strategies[k][z];
    }
  }
  const lp::Solution sol = lp::Solve(lp);
  if (sol.status != lp::Status::kOptimal) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = sol.objective;
  out.coefficients.resize(p);
  for (int k = 0; k < p; ++k) out.coefficients[k] = sol.x[k] - sol.x[p + k];
  out.certificate = sol.y;
  return out;
}

double XNorm(const DecisionProblem& problem, std::span<const double> v,
             std::int64_t cap) {
  return ComputeInducedNorm(problem, v, cap).value;
}

double EuclideanDiameter(const DecisionProblem& problem, std::int64_t cap) {
  const auto pure = EnumeratePureStrategies(problem, cap);
  double best = 0.0;
  for (std::size_t a = 0; a < pure.size(); ++a) {
    for (std::size_t b = a + 1; b < pure.size(); ++b) {
      double d = 0.0;
      for (std::size_t z = 0; z < pure[a].size(); ++z) {
        const double diff = pure[a][z] - pure[b][z];
        d += diff * diff;
      }
      best = std::max(best, d);
    }
  }
  return std::sqrt(best);
}

}  // namespace phireg
