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

#include "phireg/gadget.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "phireg/lp.h"

namespace phireg {

std::int64_t GadgetSteps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw PhiregError("gadget: eps must lie in (0, 1/2)");
  }
  return static_cast<std::int64_t>(
             std::ceil(std::log(1.0 / eps) / -std::log1p(-eps))) +
         1;
}

double GadgetMinSum(double t1, double t2, double eps) {
  if (!(t1 >= 0.0 && t1 <= 1.0 && t2 >= 0.0 && t2 <= 1.0)) {
    throw PhiregError("gadget: inputs must lie in [0, 1]");
  }
  const std::int64_t steps = GadgetSteps(eps);
  // t^(1) is the input, so C steps means C - 1 applications.
  for (std::int64_t tau = 1; tau < steps; ++tau) {
    const double a = 1.0 - (1.0 - t1) * (1.0 - t2);
    const double b = t1 * t2;
    if (a == t1 && b == t2) break;  // floating-point fixed point
    t1 = a;
    t2 = b;
  }
  return t1;
}

Vec MoebiusTransform(const Vec& values) {
  const std::size_t size = values.size();
  if (size == 0 || !std::has_single_bit(size)) {
    throw PhiregError("MoebiusTransform: table size must be a power of two");
  }
  Vec c = values;
  for (std::size_t bit = 1; bit < size; bit <<= 1) {
    for (std::size_t m = 0; m < size; ++m) {
      if (m & bit) c[m] -= c[m ^ bit];
    }
  }
  return c;
}

RepresentabilityResult CheckConvexRepresentability(const Vec& values,
                                                   int degree) {
  const int points = static_cast<int>(values.size());
  if (points > 16 || points == 0 || !std::has_single_bit(values.size())) {
    throw PhiregError("CheckConvexRepresentability: need 2^n values, n <= 4");
  }
  // Enumerate every Boolean function and keep the low-degree ones.
  std::vector<Vec> candidates;
  const std::uint32_t functions = 1u << points;
  for (std::uint32_t f = 0; f < functions; ++f) {
    Vec table(points);
    for (int m = 0; m < points; ++m) table[m] = (f >> m) & 1u;
    const Vec coef = MoebiusTransform(table);
    bool ok = true;
    for (int m = 0; m < points && ok; ++m) {
      if (std::popcount(static_cast<unsigned>(m)) > degree &&
          std::abs(coef[m]) > 1e-12) {
        ok = false;
      }
    }
    if (ok) candidates.push_back(std::move(table));
  }

  RepresentabilityResult out;
  out.num_candidates = static_cast<int>(candidates.size());
  lp::Problem prob;
  prob.a.assign(points + 1, Vec(candidates.size(), 0.0));
  prob.b.assign(points + 1, 0.0);
  prob.c.assign(candidates.size(), 0.0);
  for (std::size_t g = 0; g < candidates.size(); ++g) {
    for (int m = 0; m < points; ++m) prob.a[m][g] = candidates[g][m];
    prob.a[points][g] = 1.0;
  }
  for (int m = 0; m < points; ++m) prob.b[m] = values[m];
  prob.b[points] = 1.0;

  const lp::Solution sol = lp::Solve(prob);
  if (sol.status == lp::Status::kOptimal) {
    out.feasible = true;
    out.weights = sol.x;
    return out;
  }
  out.certificate = sol.y;
  // Check the ray independently of the solver: y.A_g <= 0 for every
  // candidate, y.b > 0.
  out.certificate_max = -INFINITY;
  for (const Vec& g : candidates) {
    double v = sol.y[points];
    for (int m = 0; m < points; ++m) v += sol.y[m] * g[m];
    out.certificate_max = std::max(out.certificate_max, v);
  }
  out.certificate_target = Dot(sol.y, prob.b);
  out.certificate_verified =
      out.certificate_max <= 1e-9 && out.certificate_target > 1e-9;
  return out;
}

Vec NonRepresentableQuadratic() {
  Vec values(16);
  for (int m = 0; m < 16; ++m) {
    const double x1 = m & 1, x2 = (m >> 1) & 1, x3 = (m >> 2) & 1,
                 x4 = (m >> 3) & 1;
    values[m] = x1 - x1 * x2 - 0.5 * x1 * x3 + 0.5 * x2 * x3 + 0.5 * x3 * x4;
  }
  return values;
}

}  // namespace phireg
