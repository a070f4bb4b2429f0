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

#ifndef PHIREG_NORMAL_FORM_H_
#define PHIREG_NORMAL_FORM_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "phireg/common.h"
#include "phireg/phi_template.h"
#include "phireg/profile.h"
#include "phireg/regret.h"

namespace phireg {

using Matrix = std::vector<Vec>;

// An n-player game with payoffs in [-1, 1], stored either as a dense tensor
// or as a polymatrix game (sum of pairwise edge payoffs).
class NormalFormGame {
 public:
  // payoffs[i][flat profile index], player 0's action varying fastest.
  static NormalFormGame Dense(std::vector<int> actions, std::vector<Vec> payoffs);
  // edges[{i, j}] is player i's A_i x A_j payoff matrix against player j.
  static NormalFormGame Polymatrix(std::vector<int> actions,
                                   std::map<std::pair<int, int>, Matrix> edges);

  int num_players() const { return static_cast<int>(actions_.size()); }
  int actions(int i) const { return actions_[i]; }
  int max_actions() const;
  bool is_polymatrix() const { return polymatrix_; }
  // Raw payoffs were divided by this to land in [-1, 1].
  double scale() const { return scale_; }

  double Payoff(int player, std::span<const int> profile) const;

  // u_i(a, pi_{-i}) for every player i and action a.
  std::vector<Vec> ExpectedUtilities(const std::vector<Vec>& profile) const;

  // Same game with a dense tensor.
  NormalFormGame ToDense() const;

  std::int64_t num_profiles() const;

 private:
  std::int64_t FlatIndex(std::span<const int> profile) const;

  std::vector<int> actions_;
  bool polymatrix_ = false;
  double scale_ = 1.0;
  std::vector<Vec> dense_;
  std::map<std::pair<int, int>, Matrix> edges_;
};

// Dense: header `nfg n A1 .. An` and lines `a1 .. an u1 .. un` (0-based
// actions, missing profiles pay 0). Polymatrix: header `nfg` or `polymatrix`
// followed by blocks `edge i j` and A_i rows of A_j numbers.
NormalFormGame ParseNormalFormGame(std::string_view text, bool polymatrix);

// Uniform random payoffs in [-1, 1].
NormalFormGame RandomDenseGame(std::vector<int> actions, std::uint64_t seed);

// x_{l+1} = Q^T x_l; returns the average of x_1 .. x_L and, optionally,
// x_{L+1}.
Vec StochasticFixedPoint(const Matrix& q, std::span<const double> x1,
                         int iterations, Vec* last = nullptr);

// Blum-Mansour swap-regret learner: one exponential-weights instance per
// action, whose distributions form the rows of a stochastic matrix Q.
class SwapLearner {
 public:
  SwapLearner(int actions, int horizon = 0,
              FixedPointInit init = FixedPointInit::kUniform);

  Vec Next(int iterations);
  // Instance a is credited pi[a] * u, where pi is the last Next() output.
  void Observe(std::span<const double> u);

  Matrix Q() const;
  int actions() const { return static_cast<int>(instances_.size()); }
  // ||Q^T pi - pi||_1 of the last Next().
  double last_error() const { return last_error_; }

 private:
  std::vector<Mwu> instances_;
  FixedPointInit init_;
  Vec pi_;
  Vec start_;
  double last_error_ = 0.0;
};

// Exact swap regret of a sequence of (pi_t, u_t) pairs:
// sum_a max_a' sum_t pi_t[a] (u_t[a'] - u_t[a]) / T.
class SwapRegretMeter {
 public:
  explicit SwapRegretMeter(int actions);
  void Record(std::span<const double> pi, std::span<const double> u);
  double Value() const;
  int rounds() const { return rounds_; }

 private:
  Matrix g_;
  int rounds_ = 0;
};

// Per round, per player mixed strategies; the joint distribution of a round
// is their product.
struct NfgProfile {
  std::vector<std::vector<Vec>> rounds;  // rounds[t][player]
};

std::vector<double> SwapGap(const NfgProfile& profile,
                            const NormalFormGame& game);

void WriteNfgProfileCsv(std::ostream& out, const NfgProfile& profile);
NfgProfile ReadNfgProfileCsv(std::istream& in, const NormalFormGame& game);

struct CeOptions {
  double c = 8.0;       // T = ceil(c A ln A / eps^2)
  int rounds = 0;       // overrides T when positive
  int iterations = 0;   // overrides L = ceil(4 / eps) when positive
  bool anytime = false; // anytime step sizes instead of horizon-tuned ones
  FixedPointInit init = FixedPointInit::kUniform;
  std::vector<int> checkpoints;  // rounds at which to record swap regret
};

struct SwapCurvePoint {
  int round = 0;
  int player = 0;
  double swap_regret = 0.0;
  double fp_error = 0.0;  // average ||Q^T pi - pi||_1 so far
};

struct CeResult {
  NfgProfile profile;
  std::vector<double> gaps;  // audited swap gap per player
  int rounds = 0;
  int iterations = 0;
  std::vector<SwapCurvePoint> curve;
  double seconds = 0.0;
};

CeResult RunCe(const NormalFormGame& game, double eps,
               const CeOptions& options = {});

void WriteSwapCurvesCsv(std::ostream& out,
                        const std::vector<SwapCurvePoint>& curve);

}  // namespace phireg

#endif  // PHIREG_NORMAL_FORM_H_
