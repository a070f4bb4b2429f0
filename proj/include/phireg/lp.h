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

#ifndef PHIREG_LP_H_
#define PHIREG_LP_H_

#include <vector>

#include "phireg/common.h"

namespace phireg::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

// Dense equality-form program: minimize c.x subject to A x = b, x >= 0.
// A is row-major with rows() == b.size() and every row of size c.size().
struct Problem {
  std::vector<Vec> a;
  Vec b;
  Vec c;
};

struct Solution {
  Status status = Status::kInfeasible;
  Vec x;
  double objective = 0.0;
  // kOptimal: dual solution y with A^T y <= c and b.y == objective.
  // kInfeasible: Farkas ray y with A^T y <= 0 and b.y > 0.
  Vec y;
  int iterations = 0;
};

// Two-phase primal simplex on a dense tableau with Bland's rule.
Solution Solve(const Problem& problem, double tol = 1e-11);

}  // namespace phireg::lp

#endif  // PHIREG_LP_H_
