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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "phireg/regret.h"

namespace phireg {
namespace {

using testing::Fig1;

// Runs CFR for T rounds against a seeded weight sequence w_t = bias + noise_t
// and returns the measured average external regret. With noise 0 the
// sequence is a fixed random weight vector repeated every round.
double CfrRegret(const DeviationDag& dag, std::uint64_t seed, int rounds,
                 double noise = 0.7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec bias(dag.num_terminals());
  for (double& b : bias) b = (1.0 - noise) * unif(rng);
  DagCfr cfr(dag);
  ExternalRegretMeter meter(dag);
  for (int t = 0; t < rounds; ++t) {
    Vec w(dag.num_terminals());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = bias[i] + noise * unif(rng);
    const ReducedStrategy q = cfr.Next();
    meter.Record(w, q.terminal);
    cfr.Observe(w);
  }
  return meter.AverageRegret();
}

TEST_CASE("fresh CFR splits uniformly") {
  const DeviationDag dag = BuildDtProblem(2, 1);
  DagCfr cfr(dag);
  const ReducedStrategy q = cfr.Next();
  CHECK(ValidateFlow(dag, q));
  for (int s = 0; s < dag.num_states(); ++s) {
    if (dag.kind(s) != NodeKind::kDecision) continue;
    const Vec p = cfr.LocalPolicy(s);
    for (double v : p) CHECK(v == doctest::Approx(1.0 / p.size()));
  }
}

TEST_CASE("regret matching on a single decision") {
  const DeviationDag dag = Interleave(testing::SingleDecision(2), 0);
  DagCfr cfr(dag);
  // Utility 1 on the first terminal: regrets become (1/2, 0).
  cfr.Observe(Vec{1.0, 0.0});
  CHECK(cfr.LocalPolicy(dag.root()) == Vec{1.0, 0.0});
  CHECK(cfr.Next().terminal == Vec{1.0, 0.0});
  CHECK(cfr.rounds() == 1);
}

TEST_CASE("one observation shifts mass toward the rewarded terminal") {
  const DeviationDag dag = BuildDtProblem(2, 0);
  DagCfr cfr(dag);
  const Vec before = cfr.Next().terminal;
  Vec w(dag.num_terminals(), 0.0);
  int target = -1;
  for (int t = 0; t < dag.num_terminals(); ++t) {
    if (dag.label(dag.terminal_state(t)) == std::vector<int>{1, 1}) target = t;
  }
  REQUIRE(target >= 0);
  w[target] = 1.0;
  cfr.Observe(w);
  CHECK(cfr.Next().terminal[target] > before[target]);
}

TEST_CASE("zero and constant weights leave regrets at zero") {
  const DeviationDag dag = Interleave(Fig1(), 1);
  DagCfr cfr(dag);
  cfr.Observe(Vec(dag.num_terminals(), 0.0));
  for (double r : cfr.regrets()) CHECK(r == 0.0);
  // In a decision-tree problem sibling subtrees are isomorphic, so a
  // constant weight does not favor any edge.
  const DeviationDag dt = BuildDtProblem(3, 2);
  DagCfr cfr2(dt);
  cfr2.Observe(Vec(dt.num_terminals(), 0.5));
  for (double r : cfr2.regrets()) CHECK(std::abs(r) <= 1e-12);
}

TEST_CASE("CFR outputs valid reduced strategies") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (const DeviationDag& dag : {BuildDtProblem(3, 1), Interleave(Fig1(), 2)}) {
    DagCfr cfr(dag);
    for (int t = 0; t < 50; ++t) {
      const ReducedStrategy q = cfr.Next();
      CHECK(ValidateFlow(dag, q));
      Vec w(dag.num_terminals());
      for (double& v : w) v = unif(rng);
      cfr.Observe(w);
    }
    CHECK(ValidateFlow(dag, cfr.Average()));
    for (double r : cfr.regrets()) CHECK(r >= 0.0);
  }
}

TEST_CASE("alternating weights on two terminals") {
  const DeviationDag dag = Interleave(testing::SingleDecision(2), 0);
  DagCfr cfr(dag);
  ExternalRegretMeter meter(dag);
  const int T = 1000;
  for (int t = 0; t < T; ++t) {
    const Vec w = t % 2 ? Vec{1.0, -1.0} : Vec{-1.0, 1.0};
    meter.Record(w, cfr.Next().terminal);
    cfr.Observe(w);
  }
  CHECK(meter.AverageRegret() <= 4.0 * std::sqrt(1.0 / T));
}

TEST_CASE("measured external regret") {
  const DeviationDag dag = BuildDtProblem(2, 1);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec w(dag.num_terminals());
  for (double& v : w) v = unif(rng);
  const ReducedStrategy best = BestReducedStrategy(dag, w).strategy;
  std::vector<std::pair<Vec, Vec>> history(10, {w, best.terminal});
  CHECK(std::abs(MeasureExternalRegret(dag, history)) <= 1e-12);
  std::vector<std::pair<Vec, Vec>> zeros(5, {Vec(dag.num_terminals(), 0.0), best.terminal});
  CHECK(MeasureExternalRegret(dag, zeros) == 0.0);
  // A uniform strategy against w pays the gap to the best response.
  DagCfr fresh(dag);
  const Vec uni = fresh.Next().terminal;
  std::vector<std::pair<Vec, Vec>> one = {{w, uni}};
  CHECK(MeasureExternalRegret(dag, one) ==
        doctest::Approx(BestReducedStrategy(dag, w).value - Dot(w, uni)));
}

TEST_CASE("CFR regret decays") {
  std::vector<DeviationDag> dags;
  dags.push_back(BuildDtProblem(2, 1));
  dags.push_back(Interleave(Fig1(), 1));
  dags.push_back(Interleave(HypercubeProblem(2), 2));
  for (const DeviationDag& dag : dags) {
    // Per seed, on fixed weight sequences.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const double r500 = CfrRegret(dag, seed, 500, 0.0);
      const double r1000 = CfrRegret(dag, seed, 1000, 0.0);
      const double r4000 = CfrRegret(dag, seed, 4000, 0.0);
      CHECK_MESSAGE(r1000 <= 0.8 * r500, dag.name() << " seed " << seed);
      CHECK_MESSAGE(r4000 <= 0.55 * r1000, dag.name() << " seed " << seed);
    }
    // With i.i.d. noise the sampling fluctuation of a single seed is of the
    // same order as the decay, so the ratio is taken over the seed average.
    double s500 = 0.0, s1000 = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      s500 += CfrRegret(dag, seed, 500);
      s1000 += CfrRegret(dag, seed, 1000);
    }
    CHECK_MESSAGE(s1000 <= 0.8 * s500, dag.name());
  }
}

TEST_CASE("CFR is deterministic") {
  const DeviationDag dag = Interleave(Fig1(), 1);
  CHECK(CfrRegret(dag, 9, 200) == CfrRegret(dag, 9, 200));
}

TEST_CASE("MWU basics") {
  Mwu m(3, 100);
  CHECK(m.Next() == Vec{1.0 / 3, 1.0 / 3, 1.0 / 3});
  m.Observe(Vec{0.0, 0.0, 0.0});
  CHECK(m.Next() == Vec{1.0 / 3, 1.0 / 3, 1.0 / 3});
  m.Observe(Vec{1.0, 0.0, 0.0}, 0.0);
  CHECK(m.rounds() == 1);
  CHECK(m.step_size() == doctest::Approx(std::sqrt(std::log(3.0) / 100)));
  CHECK_THROWS_AS(m.Observe(Vec{NAN, 0.0, 0.0}), PhiregError);
  CHECK_THROWS_AS(m.Observe(Vec{0.0, 0.0}), PhiregError);

  Mwu two(2);
  double last = 0.5;
  for (int t = 0; t < 200; ++t) {
    two.Observe(Vec{1.0, 0.0});
    const double p = two.Next()[0];
    CHECK(p > last);
    last = p;
  }
  CHECK(last > 0.99);
}

TEST_CASE("MWU regret bound and shift invariance") {
  const int T = 10000;
  for (int arms : {2, 5, 10}) {
    std::mt19937_64 rng(arms);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vec u(arms);
    for (double& v : u) v = unif(rng);
    Mwu m(arms, T);
    double got = 0.0;
    for (int t = 0; t < T; ++t) {
      got += Dot(m.Next(), u);
      m.Observe(u);
    }
    const double best = *std::max_element(u.begin(), u.end());
    CHECK((best * T - got) / T <= 2.0 * std::sqrt(std::log(arms) / T));

    Mwu a(arms, T), b(arms, T);
    Vec shifted = u;
    for (double& v : shifted) v = std::clamp(v * 0.5 + 0.3, -1.0, 1.0);
    Vec base = u;
    for (double& v : base) v *= 0.5;
    a.Observe(base);
    b.Observe(shifted);
    CHECK(testing::MaxAbsDiff(a.Next(), b.Next()) <= 1e-12);
  }
}

}  // namespace
}  // namespace phireg
