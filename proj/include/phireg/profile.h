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

#ifndef PHIREG_PROFILE_H_
#define PHIREG_PROFILE_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"
#include "phireg/strategy_maps.h"

namespace phireg {

// A correlated profile: uniform over rounds, and within a round the product
// of the players' mixtures.
struct CorrelatedProfile {
  int num_players = 0;
  std::vector<std::vector<Mixture>> rounds;  // rounds[t][player]

  int num_rounds() const { return static_cast<int>(rounds.size()); }
};

// CSV with header `t,player,ell,j,alpha,strategy`. Pure atoms are written as
// bit strings with their coefficient alpha; behavioral components use j = -1,
// alpha = 1 and the point as space-separated reals. Players are 0-based.
void WriteProfileCsv(std::ostream& out, const CorrelatedProfile& profile);

// `problems[i]` is needed only for players whose rows are behavioral.
CorrelatedProfile ReadProfileCsv(
    std::istream& in, const std::vector<const DecisionProblem*>& problems);

// Formats a double so that reading it back yields the same value.
std::string FormatExact(double v);

}  // namespace phireg

#endif  // PHIREG_PROFILE_H_
