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

#ifndef PHIREG_COMMON_H_
#define PHIREG_COMMON_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phireg {

using Vec = std::vector<double>;

// Flow-equation tolerance for sequence-form points.
inline constexpr double kFlowTolerance = 1e-9;

// Default cap for any desk-scale enumeration.
inline constexpr std::int64_t kDefaultEnumerationCap = 1'000'000;

class PhiregError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a structure exceeds a configured size cap.
class CapExceeded : public PhiregError {
 public:
  using PhiregError::PhiregError;
};

// Raised when a deviation maps some input outside the strategy polytope.
class InvalidDeviation : public PhiregError {
 public:
  using PhiregError::PhiregError;
};

inline double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PhiregError("Dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace phireg

#endif  // PHIREG_COMMON_H_
