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

// End-to-end checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixtures.h"
#include "phireg/efg.h"
#include "phireg/gadget.h"
#include "phireg/normal_form.h"
#include "phireg/norm.h"
#include "phireg/phi_template.h"

namespace phireg {
namespace {

using testing::BruteBeta;
using testing::BrutePureStrategies;
using testing::Fig1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the report.
class Tally {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string Summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failures_) s << ", " << failures_ << " failed: " << notes_;
    return s.str();
  }

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::string notes_;
};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<DecisionProblem> RandomProblems(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DecisionProblem> out;
  for (int i = 0; i < count; ++i) out.push_back(testing::RandomProblem(rng));
  return out;
}

Vec DirectError(const DecisionProblem& p, const PolynomialDeviation& phi,
                const ExpectedFixedPoint& fp) {
  Vec e = MixtureImage(p, phi, fp.pi);
  const Vec m = fp.pi.Mean(p.num_terminals());
  for (std::size_t z = 0; z < e.size(); ++z) e[z] -= m[z];
  return e;
}

double MaxAbs(const Vec& a, const Vec& b) { return testing::MaxAbsDiff(a, b); }

// Expected fixed points of random low-degree deviations.
Outcome FixedPointBound() {
  Tally tally;
  double worst_slack = -INFINITY, worst_tele = 0.0;
  struct Family {
    DecisionProblem problem;
    DeviationDag dag;
  };
  std::vector<Family> families;
  const DecisionProblem fig1 = Fig1();
  families.push_back({fig1, Interleave(fig1, 2)});
  for (int n = 1; n <= 3; ++n) {
    families.push_back({HypercubeProblem(n), BuildDtProblem(n, 1)});
  }
  std::mt19937_64 rng(101);
  for (const Family& f : families) {
    for (int d = 0; d < 50; ++d) {
      const PolynomialDeviation phi =
          ToPolynomial(f.dag, testing::RandomMixedPolicy(f.dag, rng, 3).terminal);
      tally.Expect(phi.Degree() <= 2, "degree above 2");
      tally.Expect(IsValidDeviation(f.problem, phi), "deviation leaves X");
      for (int L : {10, 50, 200}) {
        for (StrategyMap map : {StrategyMap::kBehavioral, StrategyMap::kCaratheodory}) {
          FixedPointConfig cfg;
          cfg.iterations = L;
          cfg.map = map;
          const auto fp = ComputeExpectedFixedPoint(f.problem, phi, cfg);
          const double norm = XNorm(f.problem, fp.error);
          const double tele = MaxAbs(DirectError(f.problem, phi, fp), fp.error);
          worst_slack = std::max(worst_slack, norm - 2.0 / L);
          worst_tele = std::max(worst_tele, tele);
          tally.Expect(norm <= 2.0 / L + 1e-9, f.problem.name() + " L=" +
                                                   std::to_string(L) + " norm " + Fmt(norm));
          tally.Expect(tele <= 1e-9, "telescoping off by " + Fmt(tele));
        }
      }
    }
  }
  return {tally.ok(), tally.Summary() + ", max(norm - 2/L) " + Fmt(worst_slack) +
                          ", telescoping " + Fmt(worst_tele)};
}

// Adversarial runs: utilities that push against the learner's last mean.
void AdversarialRun(Tally& tally, double& worst, const DecisionProblem& p,
                    DeviationDag dag, StrategyMap map, int L, int T,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FixedPointConfig cfg;
  cfg.iterations = L;
  cfg.map = map;
  const std::string name = dag.name();
  PhiRegretMinimizer learner(p, std::move(dag), cfg);
  Vec bias(p.num_terminals());
  for (double& v : bias) v = unit(rng);
  for (int t = 1; t <= T; ++t) {
    const Vec mean = learner.Next().Mean(p.num_terminals());
    Vec raw(p.num_terminals());
    for (int z = 0; z < p.num_terminals(); ++z) {
      raw[z] = 0.5 * bias[z] + 0.5 * (1.0 - 2.0 * mean[z]) + 0.2 * unit(rng);
    }
    learner.Observe(NormalizeUtility(p, raw).payoffs);
    const double slack = learner.PhiRegret() - learner.ExternalRegret() -
                         learner.FixedPointErrorBound();
    worst = std::max(worst, slack);
    tally.Expect(slack <= 1e-6, name + " round " + std::to_string(t) +
                                    " slack " + Fmt(slack));
  }
}

EfGame RandomEfGame(const DecisionProblem& a, const DecisionProblem& b,
                    std::uint64_t seed) {
  EfGame g;
  g.players = {a, b};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 2; ++i) {
    g.payoffs[i].assign(a.num_terminals(), Vec(b.num_terminals()));
    for (Vec& row : g.payoffs[i]) {
      for (double& v : row) v = unit(rng);
    }
  }
  NormalizeEfGame(g);
  return g;
}

SelfPlayConfig Config(const std::string& dev, int L, StrategyMap map,
                      FixedPointInit init = FixedPointInit::kUniform) {
  SelfPlayConfig c;
  c.deviation = ParseDeviationSpec(dev);
  c.fixed_point.iterations = L;
  c.fixed_point.map = map;
  c.fixed_point.init = init;
  return c;
}

Outcome CompositeBound() {
  Tally tally;
  double worst = -INFINITY;
  int runs = 0;
  const DecisionProblem fig1 = Fig1();
  const DecisionProblem cube = HypercubeProblem(3);
  const auto randoms = RandomProblems(3, 202);
  for (StrategyMap map : {StrategyMap::kBehavioral, StrategyMap::kCaratheodory}) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      AdversarialRun(tally, worst, fig1, Interleave(fig1, 1), map, 20, 300, seed);
      AdversarialRun(tally, worst, fig1, Interleave(fig1, 2), map, 20, 150, seed);
      AdversarialRun(tally, worst, cube, BuildDtProblem(3, 1), map, 20, 300, seed);
      AdversarialRun(tally, worst, cube, BuildDtProblem(3, 2), map, 20, 150, seed);
      for (const DecisionProblem& p : randoms) {
        AdversarialRun(tally, worst, p, Interleave(p, 1), map, 20, 150, seed);
      }
      runs += 4 + static_cast<int>(randoms.size());
    }
  }
  // Self-play, checked at every tenth round.
  std::vector<int> marks;
  for (int t = 10; t <= 300; t += 10) marks.push_back(t);
  auto self_play = [&](const EfGame& g, const SelfPlayConfig& c1,
                       const SelfPlayConfig& c2, int T) {
    const SelfPlayResult r = EfgSelfPlay(g, {c1, c2}, T, marks, false);
    ++runs;
    for (int i = 0; i < 2; ++i) {
      for (const CurvePoint& p : r.curves[i]) {
        const double slack = p.phi_regret - p.external_regret - p.fp_error_bound;
        worst = std::max(worst, slack);
        tally.Expect(slack <= 1e-6, g.name + " round " + std::to_string(p.round) +
                                        " slack " + Fmt(slack));
      }
    }
  };
  for (StrategyMap map : {StrategyMap::kBehavioral, StrategyMap::kCaratheodory}) {
    EfGame g = RandomEfGame(fig1, fig1, 303);
    g.name = "fig1-selfplay";
    self_play(g, Config("med:1", 20, map), Config("med:2", 20, map), 300);
    self_play(g, Config("external", 20, map),
              Config("med:1", 20, map, FixedPointInit::kWarmStart), 300);
    EfGame h = RandomEfGame(cube, fig1, 304);
    h.name = "cube-vs-fig1";
    self_play(h, Config("dt:2", 20, map), Config("med:1", 20, map), 300);
    SeparationInstance s = SeparationGame(2);
    self_play(s.game, Config("dt:2", 20, map), Config("external", 20, map), 200);
  }
  return {tally.ok(), std::to_string(runs) + " runs, " + tally.Summary() +
                          ", max(phi - ext - 2/L) " + Fmt(worst)};
}

Outcome FastCorrelatedEquilibria() {
  Tally tally;
  double worst_gap = 0.0;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> size(2, 5);
  for (int players : {2, 3}) {
    for (int g = 0; g < 5; ++g) {
      std::vector<int> actions(players);
      for (int& a : actions) a = size(rng);
      const NormalFormGame game = RandomDenseGame(actions, rng());
      const CeResult r = RunCe(game, 0.05);
      for (double gap : r.gaps) {
        worst_gap = std::max(worst_gap, gap);
        tally.Expect(gap <= 0.05, "gap " + Fmt(gap));
      }
    }
  }
  // Decay of the measured swap regret between T and 4T. Single seeds
  // fluctuate around the 1/2 rate, so the bound is applied to the
  // seed-averaged regret of each game family.
  const int T = 2000;
  double worst_seed = 0.0;
  std::string ratios;
  for (const std::vector<int>& actions : {std::vector<int>{5, 5}, {4, 3, 5}}) {
    double sum_t = 0.0, sum_4t = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const NormalFormGame game = RandomDenseGame(actions, seed);
      Vec reg[2];
      for (int k = 0; k < 2; ++k) {
        CeOptions opt;
        opt.rounds = k == 0 ? T : 4 * T;
        opt.iterations = 80;
        opt.init = FixedPointInit::kWarmStart;
        const CeResult r = RunCe(game, 0.05, opt);
        reg[k].assign(actions.size(), 0.0);
        for (const SwapCurvePoint& p : r.curve) {
          if (p.round == opt.rounds) reg[k][p.player] = p.swap_regret;
        }
      }
      for (std::size_t i = 0; i < actions.size(); ++i) {
        sum_t += reg[0][i];
        sum_4t += reg[1][i];
        worst_seed = std::max(worst_seed, reg[1][i] / reg[0][i]);
      }
    }
    const double ratio = sum_4t / sum_t;
    ratios += (ratios.empty() ? "" : "/") + Fmt(ratio);
    tally.Expect(ratio <= 0.55, std::to_string(actions.size()) +
                                    "-player ratio " + Fmt(ratio));
  }
  return {tally.ok(), tally.Summary() + ", max gap " + Fmt(worst_gap) +
                          ", Reg(4T)/Reg(T) 2p/3p " + ratios +
                          " (worst single seed " + Fmt(worst_seed) + ")"};
}

Outcome Separation() {
  Tally tally;
  std::string table;
  for (int k : {2, 3}) {
    const SeparationInstance s = SeparationGame(k);
    const double full = PhiEquilibriumGap(s.profile, s.game, 0, BuildDtProblem(k, k));
    const double less = PhiEquilibriumGap(s.profile, s.game, 0, BuildDtProblem(k, k - 1));
    tally.Expect(std::abs(full - 1.0) <= 1e-9, "k=" + std::to_string(k) + " full " + Fmt(full));
    tally.Expect(less <= 1e-9, "k=" + std::to_string(k) + " shallow " + Fmt(less));
    table += " k=" + std::to_string(k) + ": " + Fmt(full) + "/" + Fmt(less);
  }
  return {tally.ok(), tally.Summary() + "," + table};
}

Outcome Counterexample() {
  Tally tally;
  const DecisionProblem p = Fig1();
  const PolynomialDeviation phi = testing::Fig1Counterexample();
  const std::vector<Vec> pure = BrutePureStrategies(p);
  const std::set<Vec> pure_set(pure.begin(), pure.end());
  for (const Vec& x : pure) tally.Expect(pure_set.count(phi.Evaluate(x)) == 1, "pure image");
  const Vec mid = {0.5, 0.5, 0.0, 0.5, 0.0};
  const Vec naive = phi.Evaluate(mid);
  tally.Expect(MaxAbs(naive, Vec{0.5, 0.25, 0.0, 0.5, 0.0}) <= 1e-12, "naive value");
  tally.Expect(!Membership(p, naive), "naive image passes membership");
  std::mt19937_64 rng(505);
  for (int i = 0; i < 1000; ++i) {
    const Vec x = testing::RandomPoint(p, rng);
    for (StrategyMap map : {StrategyMap::kBehavioral, StrategyMap::kCaratheodory}) {
      tally.Expect(Membership(p, ExtendedMapEval(p, phi, x, map)), "extended image");
    }
  }
  return {tally.ok(), tally.Summary()};
}

Outcome MonomialFormula() {
  Tally tally;
  double worst = 0.0;
  std::vector<DecisionProblem> problems = {Fig1()};
  for (auto& p : RandomProblems(20, 606)) problems.push_back(std::move(p));
  std::mt19937_64 rng(607);
  int monomials = 0;
  for (const DecisionProblem& p : problems) {
    tally.Expect(CountPureStrategies(p) <= 64, "too many pure strategies");
    const auto subsets = testing::SmallSubsets(p.num_terminals(), 3);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec x = testing::RandomPoint(p, rng);
      const Vec nv = p.NodeValues(x);
      const auto beta = BruteBeta(p, x);
      for (const auto& s : subsets) {
        double oracle = 0.0;
        for (const auto& [y, prob] : beta) {
          double m = prob;
          for (int z : s) m *= y[z];
          oracle += m;
        }
        const double fast = MonomialExpectationBeta(p, nv, s);
        worst = std::max(worst, std::abs(fast - oracle));
        ++monomials;
      }
    }
  }
  tally.Expect(worst <= 1e-12, "max error " + Fmt(worst));
  return {tally.ok(), std::to_string(monomials) + " monomial expectations on " +
                          std::to_string(problems.size()) + " problems, max error " +
                          Fmt(worst)};
}

Outcome Mediators() {
  Tally tally;
  std::vector<DecisionProblem> problems = {Fig1(), HypercubeProblem(2),
                                           HypercubeProblem(3)};
  for (auto& p : RandomProblems(20, 707)) problems.push_back(std::move(p));
  for (const DecisionProblem& p : problems) {
    const auto xs = EnumeratePureStrategies(p);
    const auto ys = EnumeratePureStrategies(Dual(p));
    for (const Vec& x : xs) {
      for (const Vec& y : ys) tally.Expect(std::abs(Dot(x, y) - 1.0) <= 1e-12, "pairing");
    }
    const DeviationDag dag = Interleave(p, 1);
    const PolynomialDeviation follow =
        ToPolynomial(dag, FollowMediatorStrategy(dag, p).terminal);
    for (const Vec& x : xs) tally.Expect(MaxAbs(follow.Evaluate(x), x) <= 1e-12, "follow");
  }
  const DecisionProblem fig1 = Fig1();
  const DeviationDag dag2 = Interleave(fig1, 2);
  const PolynomialDeviation two =
      ToPolynomial(dag2, testing::Fig1CounterexamplePolicy(dag2, fig1).terminal);
  const PolynomialDeviation phi = testing::Fig1Counterexample();
  for (const Vec& x : EnumeratePureStrategies(fig1)) {
    tally.Expect(MaxAbs(two.Evaluate(x), phi.Evaluate(x)) <= 1e-12, "two-mediator policy");
  }
  // Self-play decay of the one-mediator regret.
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const EfGame g = RandomEfGame(fig1, fig1, 700 + seed);
    const auto c = Config("med:1", 100, StrategyMap::kBehavioral,
                          FixedPointInit::kWarmStart);
    const SelfPlayResult r = EfgSelfPlay(g, {c, c}, 4000, {1000}, false);
    for (int i = 0; i < 2; ++i) {
      const double ratio = r.curves[i][1].phi_regret / r.curves[i][0].phi_regret;
      worst = std::max(worst, ratio);
      tally.Expect(ratio <= 0.6, "decay ratio " + Fmt(ratio));
    }
  }
  return {tally.ok(), tally.Summary() + ", worst Reg(4000)/Reg(1000) " + Fmt(worst)};
}

Outcome IdentityExtension() {
  Tally tally;
  const BinarizedProblem b = Binarize(Fig1());
  const PolynomialDeviation id = ExtendIdentity(b.problem);
  tally.Expect(id.Degree() <= b.problem.depth(),
               "degree " + std::to_string(id.Degree()) + " > depth " +
                   std::to_string(b.problem.depth()));
  for (const Vec& x : EnumeratePureStrategies(b.problem)) {
    tally.Expect(MaxAbs(id.Evaluate(x), x) <= 1e-12, "differs from identity");
  }
  return {tally.ok(), tally.Summary() + ", degree " + std::to_string(id.Degree()) +
                          ", depth " + std::to_string(b.problem.depth())};
}

Outcome Gadget() {
  Tally tally;
  std::string worst;
  for (double eps : {0.1, 0.01}) {
    double w = 0.0;
    for (int i = 0; i < 100; ++i) {
      for (int j = 0; j < 100; ++j) {
        const double t1 = i / 99.0, t2 = j / 99.0;
        w = std::max(w, std::abs(GadgetMinSum(t1, t2, eps) - std::min(1.0, t1 + t2)));
      }
    }
    tally.Expect(w <= eps, "eps " + Fmt(eps) + " error " + Fmt(w));
    worst += " eps=" + Fmt(eps) + ": " + Fmt(w);
  }
  return {tally.ok(), tally.Summary() + ", max error" + worst};
}

Outcome Quadratic() {
  Tally tally;
  const Vec g = NonRepresentableQuadratic();
  const RepresentabilityResult r = CheckConvexRepresentability(g, 2);
  tally.Expect(!r.feasible, "LP found a representation");
  tally.Expect(r.certificate_verified, "certificate not verified");
  // Recheck the certificate against an independent enumeration.
  int candidates = 0;
  double top = -INFINITY;
  for (std::uint32_t f = 0; f < (1u << 16) && !r.feasible; ++f) {
    bool low = true;
    for (unsigned s = 0; s < 16 && low; ++s) {
      if (std::popcount(s) <= 2) continue;
      int c = 0;
      for (unsigned t = s;; t = (t - 1) & s) {
        const int v = (f >> t) & 1u;
        c += (std::popcount(s ^ t) % 2 == 0) ? v : -v;
        if (t == 0) break;
      }
      low = c == 0;
    }
    if (!low) continue;
    ++candidates;
    double v = r.certificate[16];
    for (int m = 0; m < 16; ++m) v += r.certificate[m] * ((f >> m) & 1u);
    top = std::max(top, v);
  }
  if (!r.feasible) {
    double target = r.certificate[16];
    for (int m = 0; m < 16; ++m) target += r.certificate[m] * g[m];
    tally.Expect(candidates == r.num_candidates, "candidate count");
    tally.Expect(top <= 1e-9 && target > 1e-9, "certificate recheck");
  }
  return {tally.ok(), tally.Summary() + ", " + std::to_string(r.num_candidates) +
                          " degree-2 Boolean functions, certificate max " + Fmt(top)};
}

struct Criterion {
  int id;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace phireg

int main(int argc, char** argv) {
  using namespace phireg;
  CLI::App app{"End-to-end acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-10)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, 30, FixedPointBound},  {2, 0, CompositeBound},
      {3, 60, FastCorrelatedEquilibria}, {4, 10, Separation},
      {5, 0, Counterexample},    {6, 0, MonomialFormula},
      {7, 0, Mediators},         {8, 0, IdentityExtension},
      {9, 0, Gadget},            {10, 600, Quadratic},
  };
  const std::set<int> wanted(only.begin(), only.end());
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs >= c.time_limit) {
      out.pass = false;
      out.detail += ", over the " + Fmt(c.time_limit) + " s budget";
    }
    all = all && out.pass;
    std::printf("criterion %d: %s  %s (%.2f s)\n", c.id, out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
