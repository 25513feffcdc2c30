#include "altperv/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "altperv/equilibrium.hpp"
#include "test_support.hpp"

namespace altperv {
namespace {

using testing::kConcavePd;
using testing::kConvexPd;

double movement(const PopulationState& a, const PopulationState& b) {
  return std::hypot(a.x_a - b.x_a, a.x_s - b.x_s);
}

TEST(StepFlowTest, EquilibriumIsStationary) {
  const GameInstance g(kConvexPd, 0.8);
  const PopulationState x{17.0 / 36.0, 0.0};
  const auto next = step_flow(g, x, 1e-2);
  EXPECT_LT(movement(x, next), 1e-12);
}

TEST(StepFlowTest, SelfishMassShrinksInPd) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const double p_a = testing::random_unit(rng);
    const GameInstance g(kConcavePd, p_a);
    const PopulationState x{p_a * testing::random_unit(rng),
                            (1 - p_a) * (0.01 + 0.99 * testing::random_unit(rng))};
    EXPECT_LT(step_flow(g, x, 1e-2).x_s, x.x_s);
  }
}

TEST(StepFlowTest, RejectsBadInputs) {
  const GameInstance g(kConvexPd, 0.5);
  EXPECT_THROW(step_flow(g, {0.1, 0.1}, 0.0), std::domain_error);
  EXPECT_THROW(step_flow(g, {0.1, 0.1}, -1.0), std::domain_error);
  EXPECT_THROW(step_flow(g, {0.1, 0.1}, std::nan("")), std::domain_error);
  EXPECT_THROW(step_flow(g, {0.6, 0.1}, 1e-2), InvalidGame);
}

TEST(StepFlowTest, ClampingKeepsStateFeasible) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 500; ++i) {
    const GameInstance g(testing::random_matrix(rng), testing::random_unit(rng));
    PopulationState x{g.p_a() * testing::random_unit(rng), g.p_s() * testing::random_unit(rng)};
    for (double dt : {1e-3, 1e-1, 10.0}) {
      const auto next = step_flow(g, x, dt);
      EXPECT_TRUE(next.feasible_in(g, 0.0));
    }
  }
}

TEST(IntegrateTest, ConcavePdConvergesToUniqueEquilibrium) {
  const GameInstance g(kConcavePd, 0.9);
  const auto tr = integrate(g, {0.45, 0.05});
  ASSERT_TRUE(tr.converged);
  EXPECT_LT(tr.final_residual, 1e-8);
  EXPECT_NEAR(tr.final_state().x_a, 0.75, 1e-8);
  EXPECT_NEAR(tr.final_state().x_s, 0.0, 1e-12);
}

TEST(IntegrateTest, ConvexPdEndsAtAnEnumeratedLevel) {
  const GameInstance g(kConvexPd, 0.8);
  const auto tr = integrate(g, {0.79, 0.01});
  ASSERT_TRUE(tr.converged);
  EXPECT_LE(enumerate_equilibria(g).distance_to(tr.final_state().utilization()), 1e-6);
}

TEST(IntegrateTest, StationaryStartConvergesImmediately) {
  const GameInstance g(kConvexPd, 0.8);
  const auto tr = integrate(g, {0.0, 0.0});
  EXPECT_TRUE(tr.converged);
  EXPECT_EQ(tr.steps, 0u);
  EXPECT_EQ(tr.samples.size(), 1u);

  const auto flat = integrate(GameInstance({2, 2, 2, 2}, 0.5), {0.2, 0.3});
  EXPECT_TRUE(flat.converged);
  EXPECT_EQ(flat.steps, 0u);
  EXPECT_EQ(flat.final_state().x_a, 0.2);
  EXPECT_EQ(flat.final_state().x_s, 0.3);
}

TEST(IntegrateTest, ReportsNonConvergence) {
  FlowOptions opts;
  opts.max_steps = 3;
  const auto tr = integrate(GameInstance(kConcavePd, 0.9), {0.1, 0.1}, opts);
  EXPECT_FALSE(tr.converged);
  EXPECT_EQ(tr.steps, 3u);
  EXPECT_EQ(tr.samples.size(), 4u);
  EXPECT_GT(tr.final_residual, opts.residual_tol);
}

TEST(IntegrateTest, SamplesAreOrderedAndFeasible) {
  FlowOptions opts;
  opts.record_every = 7;
  const GameInstance g(kConvexPd, 0.6);
  const auto tr = integrate(g, {0.5, 0.3}, opts);
  ASSERT_GE(tr.samples.size(), 2u);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_GT(tr.samples[i].t, tr.samples[i - 1].t);
  for (const auto& s : tr.samples) EXPECT_TRUE((PopulationState{s.x_a, s.x_s}.feasible_in(g, 0.0)));
  EXPECT_DOUBLE_EQ(tr.samples.back().t, static_cast<double>(tr.steps) * opts.dt);
}

TEST(IntegrateTest, RejectsBadOptions) {
  const GameInstance g(kConvexPd, 0.5);
  FlowOptions opts;
  opts.dt = 0.0;
  EXPECT_THROW(integrate(g, {0.1, 0.1}, opts), std::domain_error);
  opts = {};
  opts.max_steps = 0;
  EXPECT_THROW(integrate(g, {0.1, 0.1}, opts), std::domain_error);
  opts = {};
  opts.residual_tol = -1.0;
  EXPECT_THROW(integrate(g, {0.1, 0.1}, opts), std::domain_error);
}

TEST(FlowPropertyTest, StationaryIffNash) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const GameInstance g(testing::random_matrix(rng), testing::random_unit(rng));
    for (const auto& p : enumerate_equilibria(g).points) {
      for (double dt : {1e-3, 1e-2}) EXPECT_LT(movement(p.witness(), step_flow(g, p.witness(), dt)), 1e-12);
    }
    const PopulationState x{g.p_a() * testing::random_unit(rng), g.p_s() * testing::random_unit(rng)};
    const bool stationary = movement(x, step_flow(g, x, 1e-2)) < 1e-12;
    EXPECT_EQ(stationary, satisfies_nash(g, x, 1e-9));
  }
}

TEST(FlowPropertyTest, ConvergesOnNonKnifeEdgeGames) {
  std::mt19937_64 rng(123);
  int trials = 0;
  int converged = 0;
  while (trials < 200) {
    const auto m = testing::random_matrix(rng);
    if (std::abs(WelfareCoefficients::of(m).delta) <= 1e-3) continue;
    ++trials;
    const GameInstance g(m, testing::random_unit(rng));
    const PopulationState init{g.p_a() * testing::random_unit(rng),
                               g.p_s() * testing::random_unit(rng)};
    const auto tr = integrate(g, init);
    if (!tr.converged) continue;
    ++converged;
    EXPECT_TRUE(satisfies_nash(g, tr.final_state(), 1e-6));
  }
  EXPECT_GE(converged, 198);
}

}  // namespace
}  // namespace altperv
