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

#include "phireg/normal_form.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace phireg {

NormalFormGame NormalFormGame::Dense(std::vector<int> actions,
                                     std::vector<Vec> payoffs) {
  NormalFormGame g;
  g.actions_ = std::move(actions);
  if (g.actions_.empty()) throw PhiregError("normal-form game needs players");
  for (int a : g.actions_) {
    if (a < 1) throw PhiregError("every player needs at least one action");
  }
  const std::int64_t profiles = g.num_profiles();
  if (static_cast<int>(payoffs.size()) != g.num_players()) {
    throw PhiregError("dense game: one payoff table per player expected");
  }
  double top = 0.0;
  for (const Vec& table : payoffs) {
    if (static_cast<std::int64_t>(table.size()) != profiles) {
      throw PhiregError("dense game: payoff table has the wrong size");
    }
    for (double v : table) {
      if (!std::isfinite(v)) throw PhiregError("dense game: nonfinite payoff");
      top = std::max(top, std::abs(v));
    }
  }
  if (top > 1.0) {
    g.scale_ = top;
    for (Vec& table : payoffs) {
      for (double& v : table) v /= top;
    }
  }
  g.dense_ = std::move(payoffs);
  return g;
}

NormalFormGame NormalFormGame::Polymatrix(
    std::vector<int> actions, std::map<std::pair<int, int>, Matrix> edges) {
  NormalFormGame g;
  g.actions_ = std::move(actions);
  g.polymatrix_ = true;
  if (g.actions_.empty()) throw PhiregError("normal-form game needs players");
  for (int a : g.actions_) {
    if (a < 1) throw PhiregError("every player needs at least one action");
  }
  const int n = g.num_players();
  Vec bound(n, 0.0);
  for (const auto& [key, m] : edges) {
    const auto [i, j] = key;
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw PhiregError("polymatrix edge (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") is invalid");
    }
    if (static_cast<int>(m.size()) != g.actions_[i]) {
      throw PhiregError("polymatrix edge matrix has the wrong row count");
    }
    double top = 0.0;
    for (const Vec& row : m) {
      if (static_cast<int>(row.size()) != g.actions_[j]) {
        throw PhiregError("polymatrix edge matrix has the wrong column count");
      }
      for (double v : row) {
        if (!std::isfinite(v)) throw PhiregError("polymatrix: nonfinite payoff");
        top = std::max(top, std::abs(v));
      }
    }
    bound[i] += top;
  }
  const double top = *std::max_element(bound.begin(), bound.end());
  if (top > 1.0) {
    g.scale_ = top;
    for (auto& [key, m] : edges) {
      for (Vec& row : m) {
        for (double& v : row) v /= top;
      }
    }
  }
  g.edges_ = std::move(edges);
  return g;
}

int NormalFormGame::max_actions() const {
  return *std::max_element(actions_.begin(), actions_.end());
}

std::int64_t NormalFormGame::num_profiles() const {
  std::int64_t p = 1;
  for (int a : actions_) {
    if (p > kDefaultEnumerationCap * 100 / a) {
      throw CapExceeded("normal-form game: too many action profiles");
    }
    p *= a;
  }
  return p;
}

std::int64_t NormalFormGame::FlatIndex(std::span<const int> profile) const {
  std::int64_t idx = 0;
  for (int i = num_players() - 1; i >= 0; --i) idx = idx * actions_[i] + profile[i];
  return idx;
}

double NormalFormGame::Payoff(int player, std::span<const int> profile) const {
  if (static_cast<int>(profile.size()) != num_players()) {
    throw PhiregError("Payoff: profile has the wrong length");
  }
  if (!polymatrix_) return dense_[player][FlatIndex(profile)];
  double u = 0.0;
  for (const auto& [key, m] : edges_) {
    if (key.first == player) u += m[profile[player]][profile[key.second]];
  }
  return u;
}

std::vector<Vec> NormalFormGame::ExpectedUtilities(
    const std::vector<Vec>& profile) const {
  const int n = num_players();
  if (static_cast<int>(profile.size()) != n) {
    throw PhiregError("ExpectedUtilities: one strategy per player expected");
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(profile[i].size()) != actions_[i]) {
      throw PhiregError("ExpectedUtilities: strategy of player " +
                        std::to_string(i) + " has the wrong size");
    }
  }
  std::vector<Vec> out(n);
  for (int i = 0; i < n; ++i) out[i].assign(actions_[i], 0.0);
  if (polymatrix_) {
    for (const auto& [key, m] : edges_) {
      const auto [i, j] = key;
      for (int a = 0; a < actions_[i]; ++a) out[i][a] += Dot(m[a], profile[j]);
    }
    return out;
  }
  const std::int64_t profiles = num_profiles();
  std::vector<int> a(n, 0);
  Vec prefix(n + 1), suffix(n + 1);
  for (std::int64_t f = 0; f < profiles; ++f) {
    prefix[0] = 1.0;
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * profile[i][a[i]];
    suffix[n] = 1.0;
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * profile[i][a[i]];
    for (int i = 0; i < n; ++i) {
      const double others = prefix[i] * suffix[i + 1];
      if (others != 0.0) out[i][a[i]] += others * dense_[i][f];
    }
    for (int i = 0; i < n; ++i) {
      if (++a[i] < actions_[i]) break;
      a[i] = 0;
    }
  }
  return out;
}

NormalFormGame NormalFormGame::ToDense() const {
  if (!polymatrix_) return *this;
  const int n = num_players();
  const std::int64_t profiles = num_profiles();
  std::vector<Vec> payoffs(n, Vec(profiles, 0.0));
  std::vector<int> a(n, 0);
  for (std::int64_t f = 0; f < profiles; ++f) {
    for (int i = 0; i < n; ++i) payoffs[i][f] = Payoff(i, a);
    for (int i = 0; i < n; ++i) {
      if (++a[i] < actions_[i]) break;
      a[i] = 0;
    }
  }
  NormalFormGame g = Dense(actions_, std::move(payoffs));
  g.scale_ = scale_;
  return g;
}

namespace {

struct Lines {
  std::vector<std::vector<std::string>> tokens;
  std::vector<int> numbers;
};

Lines Tokenize(std::string_view text) {
  Lines out;
  std::istringstream in{std::string(text)};
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    out.tokens.push_back(std::move(toks));
    out.numbers.push_back(no);
  }
  return out;
}

[[noreturn]] void Fail(int line, const std::string& msg) {
  throw PhiregError("game file line " + std::to_string(line) + ": " + msg);
}

int ToInt(const std::string& s, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) Fail(line, "expected an integer, got '" + s + "'");
  return v;
}

double ToDouble(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) Fail(line, "expected a number, got '" + s + "'");
  return v;
}

}  // namespace

NormalFormGame ParseNormalFormGame(std::string_view text, bool polymatrix) {
  const Lines lines = Tokenize(text);
  if (lines.tokens.empty()) throw PhiregError("game file is empty");
  const auto& head = lines.tokens[0];
  const int head_line = lines.numbers[0];
  if (head[0] == "polymatrix") {
    polymatrix = true;
  } else if (head[0] != "nfg") {
    Fail(head_line, "expected header 'nfg n A1 .. An'");
  }
  if (head.size() < 2) Fail(head_line, "missing player count");
  const int n = ToInt(head[1], head_line);
  if (n < 1 || static_cast<int>(head.size()) != n + 2) {
    Fail(head_line, "header must list one action count per player");
  }
  std::vector<int> actions(n);
  for (int i = 0; i < n; ++i) {
    actions[i] = ToInt(head[i + 2], head_line);
    if (actions[i] < 1) Fail(head_line, "action counts must be positive");
  }

  if (!polymatrix) {
    std::int64_t profiles = 1;
    for (int a : actions) profiles *= a;
    if (profiles > kDefaultEnumerationCap) {
      Fail(head_line, "too many action profiles for a dense game");
    }
    std::vector<Vec> payoffs(n, Vec(profiles, 0.0));
    std::set<std::int64_t> seen;
    for (std::size_t l = 1; l < lines.tokens.size(); ++l) {
      const auto& t = lines.tokens[l];
      const int no = lines.numbers[l];
      if (static_cast<int>(t.size()) != 2 * n) {
        Fail(no, "expected " + std::to_string(n) + " actions and " +
                     std::to_string(n) + " payoffs");
      }
      std::int64_t idx = 0;
      for (int i = n - 1; i >= 0; --i) {
        const int a = ToInt(t[i], no);
        if (a < 0 || a >= actions[i]) Fail(no, "action out of range");
        idx = idx * actions[i] + a;
      }
      if (!seen.insert(idx).second) Fail(no, "duplicate action profile");
      for (int i = 0; i < n; ++i) payoffs[i][idx] = ToDouble(t[n + i], no);
    }
    return NormalFormGame::Dense(std::move(actions), std::move(payoffs));
  }

  std::map<std::pair<int, int>, Matrix> edges;
  std::size_t l = 1;
  while (l < lines.tokens.size()) {
    const auto& t = lines.tokens[l];
    const int no = lines.numbers[l];
    if (t.size() != 3 || t[0] != "edge") Fail(no, "expected 'edge i j'");
    const int i = ToInt(t[1], no);
    const int j = ToInt(t[2], no);
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      Fail(no, "edge players out of range");
    }
    if (edges.count({i, j})) Fail(no, "duplicate edge");
    Matrix m;
    ++l;
    for (int a = 0; a < actions[i]; ++a, ++l) {
      if (l >= lines.tokens.size()) Fail(no, "edge matrix is truncated");
      const auto& row = lines.tokens[l];
      if (static_cast<int>(row.size()) != actions[j]) {
        Fail(lines.numbers[l], "edge matrix row needs " +
                                   std::to_string(actions[j]) + " entries");
      }
      Vec r;
      for (const auto& tok : row) r.push_back(ToDouble(tok, lines.numbers[l]));
      m.push_back(std::move(r));
    }
    edges[{i, j}] = std::move(m);
  }
  return NormalFormGame::Polymatrix(std::move(actions), std::move(edges));
}

NormalFormGame RandomDenseGame(std::vector<int> actions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::int64_t profiles = 1;
  for (int a : actions) profiles *= a;
  std::vector<Vec> payoffs(actions.size(), Vec(profiles));
  for (Vec& table : payoffs) {
    for (double& v : table) v = unit(rng);
  }
  return NormalFormGame::Dense(std::move(actions), std::move(payoffs));
}

Vec StochasticFixedPoint(const Matrix& q, std::span<const double> x1,
                         int iterations, Vec* last) {
  if (iterations < 1) throw PhiregError("StochasticFixedPoint: need L >= 1");
  const int a = static_cast<int>(x1.size());
  Vec x(x1.begin(), x1.end());
  Vec avg(a, 0.0);
  Vec next(a);
  for (int ell = 0; ell < iterations; ++ell) {
    for (int i = 0; i < a; ++i) avg[i] += x[i] / iterations;
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < a; ++j) next[j] += q[i][j] * x[i];
    }
    std::swap(x, next);
  }
  if (last != nullptr) *last = x;
  return avg;
}

SwapLearner::SwapLearner(int actions, int horizon, FixedPointInit init)
    : init_(init), start_(actions, 1.0 / actions) {
  if (actions < 1) throw PhiregError("SwapLearner: need at least one action");
  // Instance a only sees the utility mass pi[a], about 1/A of a round on
  // average, so its step is larger by sqrt(A).
  instances_.reserve(actions);
  const double step_scale = std::sqrt(static_cast<double>(actions));
  for (int a = 0; a < actions; ++a) {
    instances_.emplace_back(actions, horizon, step_scale);
  }
}

Matrix SwapLearner::Q() const {
  Matrix q;
  q.reserve(instances_.size());
  for (const Mwu& m : instances_) q.push_back(m.Next());
  return q;
}

Vec SwapLearner::Next(int iterations) {
  const Matrix q = Q();
  const int a = actions();
  const Vec x1 = init_ == FixedPointInit::kWarmStart ? start_
                                                    : Vec(a, 1.0 / a);
  Vec last;
  pi_ = StochasticFixedPoint(q, x1, iterations, &last);
  start_ = last;
  Vec image(a, 0.0);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < a; ++j) image[j] += q[i][j] * pi_[i];
  }
  last_error_ = 0.0;
  for (int i = 0; i < a; ++i) last_error_ += std::abs(image[i] - pi_[i]);
  return pi_;
}

void SwapLearner::Observe(std::span<const double> u) {
  if (pi_.empty()) throw PhiregError("SwapLearner: Observe before Next");
  for (int a = 0; a < actions(); ++a) instances_[a].Observe(u, pi_[a]);
}

SwapRegretMeter::SwapRegretMeter(int actions)
    : g_(actions, Vec(actions, 0.0)) {}

void SwapRegretMeter::Record(std::span<const double> pi,
                             std::span<const double> u) {
  const int a = static_cast<int>(g_.size());
  for (int i = 0; i < a; ++i) {
    if (pi[i] == 0.0) continue;
    for (int j = 0; j < a; ++j) g_[i][j] += pi[i] * u[j];
  }
  ++rounds_;
}

double SwapRegretMeter::Value() const {
  if (rounds_ == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g_.size(); ++i) {
    const double best = *std::max_element(g_[i].begin(), g_[i].end());
    total += best - g_[i][i];
  }
  return total / rounds_;
}

std::vector<double> SwapGap(const NfgProfile& profile,
                            const NormalFormGame& game) {
  const int n = game.num_players();
  std::vector<SwapRegretMeter> meters;
  for (int i = 0; i < n; ++i) meters.emplace_back(game.actions(i));
  for (const auto& round : profile.rounds) {
    const auto u = game.ExpectedUtilities(round);
    for (int i = 0; i < n; ++i) meters[i].Record(round[i], u[i]);
  }
  std::vector<double> gaps(n);
  for (int i = 0; i < n; ++i) gaps[i] = meters[i].Value();
  return gaps;
}

void WriteNfgProfileCsv(std::ostream& out, const NfgProfile& profile) {
  out << "t,player,ell,j,alpha,strategy\n";
  for (std::size_t t = 0; t < profile.rounds.size(); ++t) {
    for (std::size_t i = 0; i < profile.rounds[t].size(); ++i) {
      const Vec& pi = profile.rounds[t][i];
      for (std::size_t a = 0; a < pi.size(); ++a) {
        if (pi[a] == 0.0) continue;
        std::string bits(pi.size(), '0');
        bits[a] = '1';
        out << t << "," << i << ",0," << a << "," << FormatExact(pi[a]) << ","
            << bits << "\n";
      }
    }
  }
}

NfgProfile ReadNfgProfileCsv(std::istream& in, const NormalFormGame& game) {
  const std::vector<const DecisionProblem*> none(game.num_players(), nullptr);
  const CorrelatedProfile raw = ReadProfileCsv(in, none);
  NfgProfile profile;
  for (int t = 0; t < raw.num_rounds(); ++t) {
    std::vector<Vec> round;
    for (int i = 0; i < game.num_players(); ++i) {
      const Mixture& mix = raw.rounds[t][i];
      if (mix.map != StrategyMap::kCaratheodory) {
        throw PhiregError("normal-form profile rows must be pure actions");
      }
      Vec pi(game.actions(i), 0.0);
      for (const auto& c : mix.components) {
        if (static_cast<int>(c.point.size()) != game.actions(i)) {
          throw PhiregError("profile action vector has the wrong length for player " +
                            std::to_string(i));
        }
        for (int a = 0; a < game.actions(i); ++a) pi[a] += c.weight * c.point[a];
      }
      round.push_back(std::move(pi));
    }
    profile.rounds.push_back(std::move(round));
  }
  return profile;
}

CeResult RunCe(const NormalFormGame& game, double eps,
               const CeOptions& options) {
  if (!(eps > 0.0)) throw PhiregError("RunCe: need eps > 0");
  const auto start = std::chrono::steady_clock::now();
  const int n = game.num_players();
  const int a_max = game.max_actions();
  CeResult result;
  result.rounds = options.rounds > 0
                      ? options.rounds
                      : std::max(1, static_cast<int>(std::ceil(
                                        options.c * a_max * std::log(a_max) /
                                        (eps * eps))));
  result.iterations = options.iterations > 0
                          ? options.iterations
                          : static_cast<int>(std::ceil(4.0 / eps));
  const int horizon = options.anytime ? 0 : result.rounds;
  std::vector<SwapLearner> learners;
  std::vector<SwapRegretMeter> meters;
  for (int i = 0; i < n; ++i) {
    learners.emplace_back(game.actions(i), horizon, options.init);
    meters.emplace_back(game.actions(i));
  }
  std::set<int> checkpoints(options.checkpoints.begin(),
                            options.checkpoints.end());
  Vec fp_error_sum(n, 0.0);
  result.profile.rounds.reserve(result.rounds);
  for (int t = 1; t <= result.rounds; ++t) {
    std::vector<Vec> round(n);
    for (int i = 0; i < n; ++i) {
      round[i] = learners[i].Next(result.iterations);
      fp_error_sum[i] += learners[i].last_error();
    }
    const auto u = game.ExpectedUtilities(round);
    for (int i = 0; i < n; ++i) {
      learners[i].Observe(u[i]);
      meters[i].Record(round[i], u[i]);
    }
    result.profile.rounds.push_back(std::move(round));
    if (checkpoints.count(t) || t == result.rounds) {
      for (int i = 0; i < n; ++i) {
        result.curve.push_back({t, i, meters[i].Value(), fp_error_sum[i] / t});
      }
    }
  }
  result.gaps = SwapGap(result.profile, game);
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

void WriteSwapCurvesCsv(std::ostream& out,
                        const std::vector<SwapCurvePoint>& curve) {
  out << "round,player,swap_regret,fp_error\n";
  for (const auto& p : curve) {
    out << p.round << "," << p.player << "," << FormatExact(p.swap_regret)
        << "," << FormatExact(p.fp_error) << "\n";
  }
}

}  // namespace phireg
