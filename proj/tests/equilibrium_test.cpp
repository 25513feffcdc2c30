#include "altperv/equilibrium.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"

namespace altperv {
namespace {

using testing::kConcavePd;
using testing::kConvexPd;
using testing::kCoordination;

std::vector<double> levels(const EquilibriumSet& set) {
  std::vector<double> out;
  for (const auto& p : set.points) out.push_back(p.u);
  return out;
}

// Smallest distance from u to any oracle state's utilization.
double nearest(const std::vector<PopulationState>& oracle, double u) {
  double best = 1e9;
  for (const auto& x : oracle) best = std::min(best, std::abs(x.utilization() - u));
  return best;
}

TEST(EnumerateTest, AllSelfishPdDefects) {
  const auto set = enumerate_equilibria(GameInstance(kConvexPd, 0.0));
  ASSERT_EQ(set.points.size(), 1u);
  EXPECT_TRUE(set.intervals.empty());
  EXPECT_EQ(set.points[0].u, 0.0);
  EXPECT_EQ(set.points[0].kind_s, Play::AllDefect);
}

TEST(EnumerateTest, ConvexPdWithLargeAltruistMass) {
  const auto set = enumerate_equilibria(GameInstance(kConvexPd, 0.8));
  ASSERT_EQ(set.points.size(), 3u);
  EXPECT_EQ(set.points[0].u, 0.0);
  EXPECT_NEAR(set.points[1].u, 17.0 / 36.0, 1e-15);
  EXPECT_NEAR(set.points[2].u, 0.8, 1e-15);

  EXPECT_EQ(set.points[0].kind_a, Play::AllDefect);
  EXPECT_EQ(set.points[1].kind_a, Play::Interior);
  EXPECT_EQ(set.points[2].kind_a, Play::AllCooperate);
  for (const auto& p : set.points) {
    EXPECT_EQ(p.kind_s, Play::AllDefect);
    EXPECT_EQ(p.witness_x_s, 0.0);
    EXPECT_NEAR(p.witness_x_a, p.u, 1e-15);
  }
}

TEST(EnumerateTest, ConcavePdAltruistsCooperate) {
  const auto set = enumerate_equilibria(GameInstance(kConcavePd, 0.5));
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.points[0].u, 0.5);
  EXPECT_EQ(set.points[0].witness_x_a, 0.5);
  EXPECT_EQ(set.points[0].witness_x_s, 0.0);
  EXPECT_EQ(set.points[0].kind_a, Play::AllCooperate);
}

TEST(EnumerateTest, CoincidentCandidatesMerge) {
  // p_a equals u*_a: the corner and indifference candidates are the same level.
  const auto set = enumerate_equilibria(GameInstance(kConcavePd, 0.75));
  ASSERT_EQ(set.points.size(), 1u);
  EXPECT_DOUBLE_EQ(set.points[0].u, 0.75);
}

TEST(SelfishEquilibriaTest, Examples) {
  EXPECT_EQ(levels(all_selfish_equilibria(GameInstance(kConvexPd, 0.8))),
            std::vector<double>{0.0});

  const auto coord = all_selfish_equilibria(GameInstance(kCoordination, 0.4));
  ASSERT_EQ(coord.points.size(), 3u);
  EXPECT_EQ(coord.points[0].u, 0.0);
  EXPECT_NEAR(coord.points[1].u, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(coord.points[2].u, 1.0);
  EXPECT_EQ(coord.points[1].kind_s, Play::Interior);

  // Grid oracle agrees on the coordination game.
  const auto oracle = oracle_equilibria(GameInstance(kCoordination, 0.0), 1e-3, 1e-6);
  for (double u : {0.0, 1.0 / 3.0, 1.0}) EXPECT_LE(nearest(oracle, u), 1e-3);
  for (const auto& x : oracle) EXPECT_LE(coord.distance_to(x.utilization()), 1e-3);
}

TEST(SelfishEquilibriaTest, ConstantGameIsAnInterval) {
  const auto set = all_selfish_equilibria(GameInstance({5, 5, 5, 5}, 0.7));
  EXPECT_TRUE(set.points.empty());
  ASSERT_EQ(set.intervals.size(), 1u);
  EXPECT_EQ(set.intervals[0].lo, 0.0);
  EXPECT_EQ(set.intervals[0].hi, 1.0);
}

TEST(AltruisticEquilibriaTest, Examples) {
  const auto concave = all_altruistic_equilibria(GameInstance(kConcavePd, 0.2));
  ASSERT_EQ(concave.size(), 1u);
  EXPECT_DOUBLE_EQ(concave.points[0].u, 0.75);

  const auto convex = all_altruistic_equilibria(GameInstance(kConvexPd, 0.2));
  ASSERT_EQ(convex.points.size(), 3u);
  EXPECT_EQ(convex.points[0].u, 0.0);
  EXPECT_NEAR(convex.points[1].u, 17.0 / 36.0, 1e-15);
  EXPECT_EQ(convex.points[2].u, 1.0);
  const auto oracle = oracle_equilibria(GameInstance(kConvexPd, 1.0), 1e-3, 1e-6);
  for (double u : levels(convex)) EXPECT_LE(nearest(oracle, u), 1e-3);

  // delta = -3, 2P - (S + T) = 1, so u*_a = -1/6: welfare decreases on [0, 1].
  const PayoffMatrix falling{1, 4, 5, 5};
  ASSERT_LT(interior_equilibrium(AgentType::Altruistic, falling)->u, 0.0);
  EXPECT_EQ(levels(all_altruistic_equilibria(GameInstance(falling, 0.5))),
            std::vector<double>{0.0});
}

TEST(DegenerateTest, SelfishIndifferentEverywhere) {
  // R = T, S = P: selfish payoffs never differ; W = 2u + 1 rises, so altruists cooperate.
  const auto set = enumerate_equilibria(GameInstance({3, 1, 3, 1}, 0.4));
  ASSERT_EQ(set.intervals.size(), 1u);
  EXPECT_TRUE(set.points.empty());
  EXPECT_DOUBLE_EQ(set.intervals[0].lo, 0.4);
  EXPECT_DOUBLE_EQ(set.intervals[0].hi, 1.0);
  EXPECT_EQ(set.intervals[0].kind_a, Play::AllCooperate);
  EXPECT_EQ(set.intervals[0].kind_s, Play::Interior);
  const auto mid = set.intervals[0].at(0.7);
  EXPECT_DOUBLE_EQ(mid.witness_x_a, 0.4);
  EXPECT_NEAR(mid.witness_x_s, 0.3, 1e-15);
}

TEST(DegenerateTest, ConstantWelfareSelfishDefect) {
  // delta = beta = 0 with S < P: altruists indifferent, selfish defect.
  const PayoffMatrix m{2, 1, 3, 2};
  ASSERT_TRUE(is_degenerate(AgentType::Altruistic, m));
  const auto set = enumerate_equilibria(GameInstance(m, 0.6));
  ASSERT_EQ(set.intervals.size(), 1u);
  EXPECT_EQ(set.intervals[0].lo, 0.0);
  EXPECT_DOUBLE_EQ(set.intervals[0].hi, 0.6);

  // Without altruists the interval collapses to a single point.
  const auto selfish = all_selfish_equilibria(GameInstance(m, 0.6));
  EXPECT_TRUE(selfish.intervals.empty());
  EXPECT_EQ(levels(selfish), std::vector<double>{0.0});
}

TEST(EnumerateTest, WeakInequalityAtCorner) {
  // S = P: selfish agents are exactly indifferent at u = 0, which is still an equilibrium.
  const auto set = all_selfish_equilibria(GameInstance({3, 1, 2, 1}, 0.0));
  EXPECT_EQ(levels(set), (std::vector<double>{0.0, 1.0}));
}

TEST(OracleTest, ConvexPdClusters) {
  const GameInstance g(kConvexPd, 0.8);
  const auto oracle = oracle_equilibria(g, 1e-3, 1e-6);
  ASSERT_FALSE(oracle.empty());
  const std::vector<double> expected{0.0, 17.0 / 36.0, 0.8};
  for (const auto& x : oracle) {
    double d = 1e9;
    for (double u : expected) d = std::min(d, std::abs(x.utilization() - u));
    EXPECT_LE(d, 1e-3);
  }
  for (double u : expected) EXPECT_LE(nearest(oracle, u), 1e-3);
}

TEST(OracleTest, NoAltruistsMeansOneDimensionalScan) {
  const auto oracle = oracle_equilibria(GameInstance(kCoordination, 0.0), 1e-3, 1e-6);
  for (const auto& x : oracle) EXPECT_EQ(x.x_a, 0.0);
}

TEST(OracleTest, ConstantGameReturnsWholeGrid) {
  const GameInstance g({5, 5, 5, 5}, 0.5);
  const auto oracle = oracle_equilibria(g, 1e-2, 1e-6);
  EXPECT_EQ(oracle.size(), 51u * 51u);
}

TEST(OracleTest, Preconditions) {
  const GameInstance g(kConvexPd, 0.5);
  EXPECT_THROW(oracle_equilibria(g, 0.0, 1e-6), std::invalid_argument);
  EXPECT_THROW(oracle_equilibria(g, 0.05, 1e-6), std::invalid_argument);
  EXPECT_THROW(oracle_equilibria(g, 1e-3, 0.0), std::invalid_argument);
}

TEST(SatisfiesNashTest, DirectPayoffComparison) {
  const GameInstance g(kConvexPd, 0.8);
  EXPECT_TRUE(satisfies_nash(g, {0.0, 0.0}));
  EXPECT_TRUE(satisfies_nash(g, {17.0 / 36.0, 0.0}));
  EXPECT_FALSE(satisfies_nash(g, {0.3, 0.0}));
  EXPECT_FALSE(satisfies_nash(g, {0.0, 0.1}));
  EXPECT_FALSE(satisfies_nash(g, {0.9, 0.0}));  // infeasible
}

class RandomGameTest : public ::testing::Test {
 protected:
  std::mt19937_64 rng{777};
};

TEST_F(RandomGameTest, EveryPointIsAVerifiedEquilibrium) {
  for (int i = 0; i < 1000; ++i) {
    const GameInstance g(testing::random_matrix(rng), testing::random_unit(rng));
    for (const auto& set :
         {enumerate_equilibria(g), all_selfish_equilibria(g), all_altruistic_equilibria(g)}) {
      ASSERT_FALSE(set.empty());
      for (std::size_t k = 0; k < set.points.size(); ++k) {
        const auto& p = set.points[k];
        if (k > 0) { EXPECT_GT(p.u, set.points[k - 1].u + tol::kMerge); }
        EXPECT_NEAR(p.witness_x_a + p.witness_x_s, p.u, 1e-12);
      }
    }
    const auto set = enumerate_equilibria(g);
    for (const auto& p : set.points) {
      EXPECT_TRUE(satisfies_nash(g, p.witness(), 1e-9));
      EXPECT_GE(p.witness_x_a, 0.0);
      EXPECT_LE(p.witness_x_a, g.p_a());
      EXPECT_GE(p.witness_x_s, 0.0);
      EXPECT_LE(p.witness_x_s, g.p_s() + 1e-15);
      if (p.kind_a == Play::AllDefect) { EXPECT_EQ(p.witness_x_a, 0.0); }
      if (p.kind_a == Play::AllCooperate) { EXPECT_EQ(p.witness_x_a, g.p_a()); }
      if (p.kind_s == Play::AllDefect) { EXPECT_EQ(p.witness_x_s, 0.0); }
      if (p.kind_s == Play::AllCooperate) { EXPECT_NEAR(p.witness_x_s, g.p_s(), 1e-15); }
      if (p.kind_a == Play::Interior) {
        EXPECT_NEAR(altruistic_payoff(p.u, g.matrix()).gap(), 0.0, 1e-9);
      }
      if (p.kind_s == Play::Interior) {
        EXPECT_NEAR(selfish_payoff(p.u, g.matrix()).gap(), 0.0, 1e-9);
      }
    }
  }
}

TEST_F(RandomGameTest, StrictlyConcaveWelfareHasUniqueSingleTypeEquilibria) {
  int checked = 0;
  while (checked < 1000) {
    const auto m = testing::random_matrix(rng);
    if (WelfareCoefficients::of(m).delta >= -1e-6) continue;
    ++checked;
    const GameInstance g(m, testing::random_unit(rng));
    EXPECT_EQ(all_selfish_equilibria(g).size(), 1u);
    EXPECT_EQ(all_altruistic_equilibria(g).size(), 1u);
  }
}

TEST_F(RandomGameTest, AgreesWithGridOracle) {
  constexpr double step = 1e-3;
  for (int i = 0; i < 1000; ++i) {
    const GameInstance g(testing::random_matrix(rng), testing::random_unit(rng));
    const auto analytic = enumerate_equilibria(g);
    const auto oracle = oracle_equilibria(g, step, 1e-6);
    ASSERT_FALSE(oracle.empty());
    for (const auto& p : analytic.points) EXPECT_LE(nearest(oracle, p.u), step) << "game " << i;
    for (const auto& x : oracle) EXPECT_LE(analytic.distance_to(x.utilization()), step);
  }
}

}  // namespace
}  // namespace altperv
