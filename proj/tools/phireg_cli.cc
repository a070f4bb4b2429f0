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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phireg/efg.h"
#include "phireg/gadget.h"
#include "phireg/normal_form.h"
#include "phireg/profile.h"

namespace phireg {
namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PhiregError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PhiregError("cannot write '" + path + "'");
  return out;
}

// First word of the first non-comment line.
std::string Header(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream ls(line);
    std::string word;
    if (ls >> word) return word;
  }
  return "";
}

FixedPointInit ParseInit(const std::string& s) {
  if (s == "uniform") return FixedPointInit::kUniform;
  if (s == "warm") return FixedPointInit::kWarmStart;
  throw PhiregError("unknown init '" + s + "' (expected uniform or warm)");
}

struct NfgArgs {
  std::string game, out, curves;
  double eps = 0.05;
  bool polymatrix = false;
  int rounds = 0;
  int iterations = 0;
  double c = 8.0;
  std::string init = "uniform";
};

int RunNfgCe(const NfgArgs& a) {
  const NormalFormGame game = ParseNormalFormGame(ReadFile(a.game), a.polymatrix);
  CeOptions opt;
  opt.c = a.c;
  opt.rounds = a.rounds;
  opt.iterations = a.iterations;
  opt.init = ParseInit(a.init);
  const int planned = a.rounds > 0
                          ? a.rounds
                          : static_cast<int>(std::ceil(
                                a.c * game.max_actions() *
                                std::log(game.max_actions()) / (a.eps * a.eps)));
  for (int t = 1; t < planned; t *= 2) opt.checkpoints.push_back(t);
  const CeResult r = RunCe(game, a.eps, opt);
  if (!a.out.empty()) {
    auto out = OpenOut(a.out);
    WriteNfgProfileCsv(out, r.profile);
  }
  if (!a.curves.empty()) {
    auto out = OpenOut(a.curves);
    WriteSwapCurvesCsv(out, r.curve);
  }
  std::printf("rounds %d, fixed-point iterations %d, %.3f s\n", r.rounds,
              r.iterations, r.seconds);
  bool ok = true;
  for (std::size_t i = 0; i < r.gaps.size(); ++i) {
    std::printf("player %zu swap gap %.6g\n", i, r.gaps[i]);
    ok = ok && r.gaps[i] <= a.eps;
  }
  if (game.scale() != 1.0) std::printf("payoffs were divided by %.6g\n", game.scale());
  std::printf("%s\n", ok ? "certified" : "NOT certified: gap above eps");
  return ok ? 0 : 2;
}

struct EfgArgs {
  std::string game, dev = "external", dev2, delta = "beta", out, curves;
  std::string init = "uniform";
  int rounds = 1000;
  int iterations = 100;
};

int RunEfg(const EfgArgs& a) {
  const EfGame game = ParseEfGame(ReadFile(a.game));
  std::array<SelfPlayConfig, 2> cfg;
  for (int i = 0; i < 2; ++i) {
    cfg[i].deviation = ParseDeviationSpec(i == 1 && !a.dev2.empty() ? a.dev2 : a.dev);
    cfg[i].fixed_point.iterations = a.iterations;
    cfg[i].fixed_point.map = ParseStrategyMap(a.delta);
    cfg[i].fixed_point.init = ParseInit(a.init);
  }
  std::vector<int> marks;
  const int step = std::max(1, a.rounds / 100);
  for (int t = step; t <= a.rounds; t += step) marks.push_back(t);
  const SelfPlayResult r = EfgSelfPlay(game, cfg, a.rounds, marks, !a.out.empty());
  if (!a.out.empty()) {
    auto out = OpenOut(a.out);
    WriteProfileCsv(out, r.profile);
  }
  if (!a.curves.empty()) {
    auto out = OpenOut(a.curves);
    out << "player,round,phi_regret,external_regret,fp_error_bound\n";
    for (int i = 0; i < 2; ++i) {
      for (const CurvePoint& p : r.curves[i]) {
        out << i << "," << p.round << "," << FormatExact(p.phi_regret) << ","
            << FormatExact(p.external_regret) << "," << FormatExact(p.fp_error_bound)
            << "\n";
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    std::printf("player %d (%s): phi-regret %.6g, external regret %.6g, "
                "fixed-point bound %.6g\n",
                i, cfg[i].deviation.ToString().c_str(), r.phi_regret[i],
                r.external_regret[i], 2.0 / a.iterations);
  }
  return 0;
}

struct AuditArgs {
  std::string profile, game, dev;
  bool polymatrix = false;
};

int RunAudit(const AuditArgs& a) {
  const std::string text = ReadFile(a.game);
  const std::string head = Header(text);
  std::ifstream in(a.profile);
  if (!in) throw PhiregError("cannot open '" + a.profile + "'");
  if (head == "efg") {
    if (a.dev.empty()) throw PhiregError("audit: --dev is required for efg games");
    const EfGame game = ParseEfGame(text);
    const CorrelatedProfile profile =
        ReadProfileCsv(in, {&game.players[0], &game.players[1]});
    const DeviationSpec spec = ParseDeviationSpec(a.dev);
    std::printf("%d rounds, deviations %s\n", profile.num_rounds(),
                spec.ToString().c_str());
    for (int i = 0; i < 2; ++i) {
      const DeviationDag dag = BuildDeviationDag(game.players[i], spec);
      std::printf("player %d gap %.17g\n", i, PhiEquilibriumGap(profile, game, i, dag));
    }
    return 0;
  }
  if (!a.dev.empty() && a.dev != "swap") {
    throw PhiregError("audit: normal-form games are audited against swap deviations");
  }
  const NormalFormGame game = ParseNormalFormGame(text, a.polymatrix);
  const NfgProfile profile = ReadNfgProfileCsv(in, game);
  const auto gaps = SwapGap(profile, game);
  std::printf("%zu rounds, deviations swap\n", profile.rounds.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    std::printf("player %zu gap %.17g\n", i, gaps[i]);
  }
  return 0;
}

int RunSeparation(int k) {
  const SeparationInstance s = SeparationGame(k);
  std::printf("separation game, k = %d: %d profile rounds\n", k, s.profile.num_rounds());
  std::printf("bits are recoded from {-1,1} to {0,1} by x -> (1 + x) / 2; "
              "payoffs stay in {-1,1}, slope 1\n");
  std::printf("%-8s %-12s %s\n", "depth", "DT states", "gap");
  for (int d = 0; d <= k; ++d) {
    const DeviationDag dag = BuildDtProblem(k, d);
    const double gap = PhiEquilibriumGap(s.profile, s.game, 0, dag);
    std::printf("%-8d %-12d %.12f\n", d, dag.num_states(), gap);
  }
  return 0;
}

int RunGadget(double t1, double t2, double eps) {
  const double v = GadgetMinSum(t1, t2, eps);
  const double target = std::min(1.0, t1 + t2);
  std::printf("steps %lld\nvalue %.17g\nmin(1, t1 + t2) %.17g\nerror %.3g\n",
              static_cast<long long>(GadgetSteps(eps)), v, target,
              std::abs(v - target));
  return 0;
}

}  // namespace
}  // namespace phireg

int main(int argc, char** argv) {
  using namespace phireg;
  CLI::App app{"Phi-regret minimization and equilibrium tools"};
  app.require_subcommand(1);

  NfgArgs nfg;
  auto* ce = app.add_subcommand("nfg-ce", "Correlated equilibrium of a normal-form game");
  ce->add_option("--game", nfg.game, "Game file")->required()->check(CLI::ExistingFile);
  ce->add_option("--eps", nfg.eps, "Target swap gap")->check(CLI::PositiveNumber);
  ce->add_flag("--polymatrix", nfg.polymatrix, "Read the file as a polymatrix game");
  ce->add_option("--out", nfg.out, "Profile CSV");
  ce->add_option("--curves", nfg.curves, "Swap-regret curve CSV");
  ce->add_option("--rounds", nfg.rounds, "Override the number of rounds");
  ce->add_option("--iterations", nfg.iterations, "Override fixed-point iterations");
  ce->add_option("--c", nfg.c, "Round-count constant")->check(CLI::PositiveNumber);
  ce->add_option("--init", nfg.init, "Fixed-point start: uniform or warm");

  EfgArgs efg;
  auto* run = app.add_subcommand("efg-run", "Self-play in a two-player tree-form game");
  run->add_option("--game", efg.game, "Game file")->required()->check(CLI::ExistingFile);
  run->add_option("--dev", efg.dev, "external, dt:K, dtd:K or med:K");
  run->add_option("--dev2", efg.dev2, "Deviation set of player 2 (default: --dev)");
  run->add_option("--rounds", efg.rounds, "Rounds")->check(CLI::PositiveNumber);
  run->add_option("--delta", efg.delta, "Strategy map: beta or cara");
  run->add_option("--iterations", efg.iterations, "Fixed-point iterations")
      ->check(CLI::PositiveNumber);
  run->add_option("--init", efg.init, "Fixed-point start: uniform or warm");
  run->add_option("--out", efg.out, "Profile CSV");
  run->add_option("--curves", efg.curves, "Regret curve CSV");

  AuditArgs audit;
  auto* aud = app.add_subcommand("audit", "Exact equilibrium gap of a profile");
  aud->add_option("--profile", audit.profile, "Profile CSV")->required()
      ->check(CLI::ExistingFile);
  aud->add_option("--game", audit.game, "Game file")->required()->check(CLI::ExistingFile);
  aud->add_option("--dev", audit.dev, "Deviation set (swap for normal-form games)");
  aud->add_flag("--polymatrix", audit.polymatrix, "Read the file as a polymatrix game");

  int k = 2;
  auto* sep = app.add_subcommand("separation", "Gap table of the separation game");
  sep->add_option("--k", k, "Number of bits")->required()->check(CLI::Range(1, 10));

  double t1 = 0.0, t2 = 0.0, eps = 0.01;
  auto* gad = app.add_subcommand("gadget", "Min-sum gate from products and complements");
  gad->add_option("--t1", t1)->required()->check(CLI::Range(0.0, 1.0));
  gad->add_option("--t2", t2)->required()->check(CLI::Range(0.0, 1.0));
  gad->add_option("--eps", eps)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*ce) return RunNfgCe(nfg);
    if (*run) return RunEfg(efg);
    if (*aud) return RunAudit(audit);
    if (*sep) return RunSeparation(k);
    if (*gad) return RunGadget(t1, t2, eps);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
