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

#include "phireg/efg.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

namespace phireg {

Vec EfGame::Utility(int player, std::span<const double> opponent_mean) const {
  const Matrix& u = payoffs[player == 0 ? 0 : 1];
  const int n1 = players[0].num_terminals();
  const int n2 = players[1].num_terminals();
  if (player == 0) {
    if (static_cast<int>(opponent_mean.size()) != n2) {
      throw PhiregError("EfGame::Utility: opponent strategy has the wrong size");
    }
    Vec out(n1, 0.0);
    for (int a = 0; a < n1; ++a) out[a] = Dot(u[a], opponent_mean);
    return out;
  }
  if (static_cast<int>(opponent_mean.size()) != n1) {
    throw PhiregError("EfGame::Utility: opponent strategy has the wrong size");
  }
  Vec out(n2, 0.0);
  for (int a = 0; a < n1; ++a) {
    if (opponent_mean[a] == 0.0) continue;
    for (int b = 0; b < n2; ++b) out[b] += u[a][b] * opponent_mean[a];
  }
  return out;
}

void NormalizeEfGame(EfGame& game) {
  const auto pure2 = EnumeratePureStrategies(game.players[1]);
  for (int i = 0; i < 2; ++i) {
    double top = 0.0;
    for (const Vec& y : pure2) {
      // x^T U_i y over pure x is a linear optimization over player 1's tree.
      Vec col(game.players[0].num_terminals(), 0.0);
      for (std::size_t a = 0; a < col.size(); ++a) col[a] = Dot(game.payoffs[i][a], y);
      top = std::max(top, std::abs(BestPureResponse(game.players[0], col).value));
      top = std::max(top, std::abs(WorstPureResponse(game.players[0], col).value));
    }
    if (top > 1.0) {
      game.scale[i] *= top;
      for (Vec& row : game.payoffs[i]) {
        for (double& v : row) v /= top;
      }
    }
  }
}

EfGame ParseEfGame(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  auto words = [&](std::size_t l) {
    std::string s = lines[l];
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.resize(hash);
    std::istringstream ls(s);
    std::vector<std::string> out;
    std::string w;
    while (ls >> w) out.push_back(w);
    return out;
  };
  auto fail = [](std::size_t l, const std::string& msg) -> PhiregError {
    return PhiregError("game file line " + std::to_string(l + 1) + ": " + msg);
  };

  EfGame game;
  std::size_t l = 0;
  auto skip_blank = [&] {
    while (l < lines.size() && words(l).empty()) ++l;
  };
  skip_blank();
  if (l >= lines.size()) throw PhiregError("game file is empty");
  {
    const auto head = words(l);
    if (head[0] != "efg" || head.size() != 2) throw fail(l, "expected 'efg <name>'");
    game.name = head[1];
    ++l;
  }
  for (int p = 0; p < 2; ++p) {
    skip_blank();
    const auto head = l < lines.size() ? words(l) : std::vector<std::string>{};
    if (head.size() != 2 || head[0] != "player" ||
        head[1] != std::to_string(p + 1)) {
      throw fail(l, "expected 'player " + std::to_string(p + 1) + "'");
    }
    const std::size_t begin = ++l;
    while (l < lines.size()) {
      const auto w = words(l);
      if (!w.empty() && (w[0] == "player" || w[0] == "payoffs")) break;
      ++l;
    }
    const std::vector<std::string> block(lines.begin() + begin,
                                         lines.begin() + l);
    game.players[p] = ParseProblemLines(block, static_cast<int>(begin) + 1);
  }
  skip_blank();
  if (l >= lines.size() || words(l) != std::vector<std::string>{"payoffs"}) {
    throw fail(l, "expected 'payoffs'");
  }
  ++l;
  const int n1 = game.players[0].num_terminals();
  const int n2 = game.players[1].num_terminals();
  for (int i = 0; i < 2; ++i) game.payoffs[i].assign(n1, Vec(n2, 0.0));
  std::set<std::pair<int, int>> seen;
  for (; l < lines.size(); ++l) {
    const auto w = words(l);
    if (w.empty()) continue;
    if (w.size() != 4) throw fail(l, "expected '<z1> <z2> <u1> <u2>'");
    int z[2];
    for (int p = 0; p < 2; ++p) {
      try {
        z[p] = game.players[p].TerminalByLabel(w[p]);
      } catch (const PhiregError&) {
        throw fail(l, "unknown terminal '" + w[p] + "' of player " +
                          std::to_string(p + 1));
      }
    }
    const int z1 = z[0], z2 = z[1];
    if (!seen.insert({z1, z2}).second) throw fail(l, "duplicate terminal pair");
    for (int i = 0; i < 2; ++i) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(w[2 + i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != w[2 + i].size() || !std::isfinite(v)) {
        throw fail(l, "bad payoff '" + w[2 + i] + "'");
      }
      game.payoffs[i][z1][z2] = v;
    }
  }
  NormalizeEfGame(game);
  return game;
}

SelfPlayResult EfgSelfPlay(const EfGame& game,
                           const std::array<SelfPlayConfig, 2>& configs,
                           int rounds, const std::vector<int>& checkpoints,
                           bool keep_profile, std::int64_t cap) {
  if (rounds < 1) throw PhiregError("EfgSelfPlay: need at least one round");
  std::array<std::unique_ptr<PhiRegretMinimizer>, 2> learners;
  for (int i = 0; i < 2; ++i) {
    learners[i] = std::make_unique<PhiRegretMinimizer>(
        game.players[i],
        BuildDeviationDag(game.players[i], configs[i].deviation, cap),
        configs[i].fixed_point);
  }
  const std::set<int> marks(checkpoints.begin(), checkpoints.end());
  SelfPlayResult result;
  result.profile.num_players = 2;
  for (int t = 1; t <= rounds; ++t) {
    std::array<Mixture, 2> pi = {learners[0]->Next(), learners[1]->Next()};
    const std::array<Vec, 2> mean = {
        learners[0]->last_fixed_point().mean,
        learners[1]->last_fixed_point().mean};
    learners[0]->Observe(game.Utility(0, mean[1]));
    learners[1]->Observe(game.Utility(1, mean[0]));
    if (keep_profile) {
      result.profile.rounds.push_back({std::move(pi[0]), std::move(pi[1])});
    }
    if (marks.count(t) || t == rounds) {
      for (int i = 0; i < 2; ++i) {
        result.curves[i].push_back({t, learners[i]->PhiRegret(),
                                    learners[i]->ExternalRegret(),
                                    learners[i]->FixedPointErrorBound()});
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    result.phi_regret[i] = learners[i]->PhiRegret();
    result.external_regret[i] = learners[i]->ExternalRegret();
  }
  return result;
}

double PhiEquilibriumGap(const CorrelatedProfile& profile, const EfGame& game,
                         int player, const DeviationDag& dag) {
  if (profile.num_players != 2) {
    throw PhiregError("PhiEquilibriumGap: profile must have two players");
  }
  const DecisionProblem& mine = game.players[player];
  const DecisionProblem& theirs = game.players[1 - player];
  PhiRegretMeter meter(mine, dag);
  for (const auto& round : profile.rounds) {
    const Vec opponent = round[1 - player].Mean(theirs.num_terminals());
    meter.Record(game.Utility(player, opponent), round[player]);
  }
  return meter.Value();
}

SeparationInstance SeparationGame(int k) {
  if (k < 1 || k > 10) throw PhiregError("SeparationGame: need 1 <= k <= 10");
  SeparationInstance out;
  EfGame& g = out.game;
  g.name = "separation" + std::to_string(k);
  g.players[0] = HypercubeProblem(k);
  std::vector<RawNode> raw = {
      {"s", NodeKind::kDecision, "", "", 0},
      {"neg", NodeKind::kTerminal, "s", "-1", 0},
      {"pos", NodeKind::kTerminal, "s", "+1", 0},
  };
  g.players[1] = DecisionProblem::Build("sign", std::move(raw));
  const int n1 = g.players[0].num_terminals();
  for (int i = 0; i < 2; ++i) g.payoffs[i].assign(n1, Vec(2, 0.0));
  // Only the first coordinate pays: (2a - 1) * y.
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      g.payoffs[0][HypercubeLiteral(0, a)][b] = (2.0 * a - 1.0) * (2.0 * b - 1.0);
    }
  }

  out.profile.num_players = 2;
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vec bits(k);
    int sign = 1;
    for (int j = 0; j < k; ++j) {
      bits[j] = (mask >> j) & 1;
      if (bits[j] == 0.0) sign = -sign;
    }
    Mixture p1;
    p1.map = StrategyMap::kCaratheodory;
    p1.Add(nullptr, 0, 0, 1.0, BitsToHypercube(bits));
    Mixture p2;
    p2.map = StrategyMap::kCaratheodory;
    p2.Add(nullptr, 0, 0, 1.0, sign > 0 ? Vec{0.0, 1.0} : Vec{1.0, 0.0});
    out.profile.rounds.push_back({std::move(p1), std::move(p2)});
  }
  return out;
}

}  // namespace phireg
