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

#ifndef PHIREG_EFG_H_
#define PHIREG_EFG_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phireg/common.h"
#include "phireg/decision_problem.h"
#include "phireg/deviation_dag.h"
#include "phireg/normal_form.h"
#include "phireg/phi_template.h"
#include "phireg/profile.h"

namespace phireg {

// Two-player game over a pair of tree-form decision problems. The payoff of
// a pure profile (x, y) to player i is x^T U_i y.
struct EfGame {
  std::string name;
  std::array<DecisionProblem, 2> players;
  std::array<Matrix, 2> payoffs;  // N1 x N2 each
  std::array<double, 2> scale = {1.0, 1.0};

  const DecisionProblem& problem(int i) const { return players[i]; }
  // Utility vector of `player` against the opponent's mean strategy.
  Vec Utility(int player, std::span<const double> opponent_mean) const;
};

// Rescales each player's payoffs so that every pure profile pays within
// [-1, 1]. Called by the parser.
void NormalizeEfGame(EfGame& game);

// Text format:
//   efg <name>
//   player 1
//   tfsdp <name> ... node lines ...
//   player 2
//   tfsdp <name> ... node lines ...
//   payoffs
//   <terminal id of player 1> <terminal id of player 2> <u1> <u2>
// Terminal pairs that are not listed pay 0.
EfGame ParseEfGame(std::string_view text);

struct SelfPlayConfig {
  DeviationSpec deviation;
  FixedPointConfig fixed_point;
};

struct SelfPlayResult {
  CorrelatedProfile profile;
  std::array<std::vector<CurvePoint>, 2> curves;
  std::array<double, 2> phi_regret = {0.0, 0.0};
  std::array<double, 2> external_regret = {0.0, 0.0};
};

// Both players run a Phi-regret minimizer for `rounds` rounds. Curves are
// recorded at each checkpoint (and at the last round).
SelfPlayResult EfgSelfPlay(const EfGame& game,
                           const std::array<SelfPlayConfig, 2>& configs,
                           int rounds, const std::vector<int>& checkpoints,
                           bool keep_profile = true,
                           std::int64_t cap = kDefaultEnumerationCap);

// Largest gain player i can get from a deviation in `dag`, against the
// profile: E_pi <u_i, phi(x_i) - x_i> maximized over the set.
double PhiEquilibriumGap(const CorrelatedProfile& profile, const EfGame& game,
                         int player, const DeviationDag& dag);

// The game where player 1 picks k bits, player 2 picks a sign y, and player 1
// earns x_1 * y in +-1 coordinates; with the profile that is uniform over the
// bit vectors b with y equal to the product of the signs of b.
struct SeparationInstance {
  EfGame game;
  CorrelatedProfile profile;
};
SeparationInstance SeparationGame(int k);

}  // namespace phireg

#endif  // PHIREG_EFG_H_
