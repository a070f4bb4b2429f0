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

#ifndef PHIREG_GADGET_H_
#define PHIREG_GADGET_H_

#include <cstdint>
#include <vector>

#include "phireg/common.h"

namespace phireg {

// Number of steps of the (1 - (1-a)(1-b), ab) map that suffice for accuracy
// eps: ceil(log(1/eps) / log(1/(1-eps))) + 1.
std::int64_t GadgetSteps(double eps);

// Approximates min(1, t1 + t2) using only complement and product gates.
// Requires t1, t2 in [0, 1] and eps in (0, 1/2).
double GadgetMinSum(double t1, double t2, double eps);

// Multilinear (Moebius) coefficients of f : {0,1}^n -> R, indexed by subset
// mask; values[m] is f at the point whose bits are m.
Vec MoebiusTransform(const Vec& values);

struct RepresentabilityResult {
  bool feasible = false;
  int num_candidates = 0;
  // Feasible: weights over candidates. Infeasible: a Farkas certificate
  // (one entry per point of the cube plus one for the normalization row).
  Vec weights;
  Vec certificate;
  // Largest candidate value of the certificate (<= 0 when it is valid) and
  // its value on the target (> 0 when valid).
  double certificate_max = 0.0;
  double certificate_target = 0.0;
  bool certificate_verified = false;
};

// Whether g : {0,1}^n -> [0,1] (given as a value table, n <= 4) is a convex
// combination of Boolean functions of multilinear degree at most `degree`.
RepresentabilityResult CheckConvexRepresentability(const Vec& values,
                                                   int degree);

// Value table of x1 - x1x2 - x1x3/2 + x2x3/2 + x3x4/2 over {0,1}^4.
Vec NonRepresentableQuadratic();

}  // namespace phireg

#endif  // PHIREG_GADGET_H_
