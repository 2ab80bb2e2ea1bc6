#include "kgen/rewards.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace kgen {
namespace {

TEST(AccuracyReward, ZeroErrorIsOne) {
  EXPECT_NEAR(accuracy_reward(0.0, 0.0, {}), 1.0, 1e-15);
}

TEST(AccuracyReward, DirectEvaluation) {
  // 0.5*exp(-1) + 0.5*exp(-1)
  EXPECT_NEAR(accuracy_reward(1.0, 2.0, {}), std::exp(-1.0), 1e-12);
}

TEST(AccuracyReward, VanishesForHugeErrors) {
  EXPECT_LT(accuracy_reward(1e4, 1e4, {}), 1e-300);
  EXPECT_GE(accuracy_reward(1e6, 1e6, {}), 0.0);
}

TEST(AccuracyReward, NegativeInputRejected) {
  EXPECT_THROW(accuracy_reward(-0.1, 0.0, {}), std::invalid_argument);
  EXPECT_THROW(accuracy_reward(0.0, -1.0, {}), std::invalid_argument);
}

TEST(AccuracyReward, StrictlyDecreasingInEachArgument) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const RewardConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), f = u(rng), da = u(rng) + 1e-3, df = u(rng) + 1e-3;
    EXPECT_LT(accuracy_reward(a + da, f, cfg), accuracy_reward(a, f, cfg));
    EXPECT_LT(accuracy_reward(a, f + df, cfg), accuracy_reward(a, f, cfg));
  }
}

TEST(CotReward, Boundaries) {
  const RewardConfig cfg;
  EXPECT_DOUBLE_EQ(cot_reward(0, cfg), 1.0);
  EXPECT_DOUBLE_EQ(cot_reward(512, cfg), 0.0);   // L == L_max -> 1 - 1 = 0
  EXPECT_DOUBLE_EQ(cot_reward(513, cfg), 0.0);   // over the cap -> 0, continuous
  EXPECT_DOUBLE_EQ(cot_reward(256, cfg), 0.5);
}

TEST(CotReward, NonIncreasing) {
  const RewardConfig cfg;
  double prev = 2.0;
  for (int l = 0; l <= 600; ++l) {
    const double r = cot_reward(l, cfg);
    EXPECT_LE(r, prev);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
    prev = r;
  }
  EXPECT_THROW(cot_reward(-1, cfg), std::invalid_argument);
}

TEST(CompositeReward, PaperWeights) {
  const auto b = composite_reward(1.0, 1.0, 1.0, {});
  EXPECT_NEAR(b.composite, 1.0, 1e-12);
  const auto z = composite_reward(0.0, 0.0, 0.0, {});
  EXPECT_DOUBLE_EQ(z.composite, 0.0);
  const auto m = composite_reward(0.367879441171442, 0.5, 1.0, {});
  EXPECT_NEAR(m.composite, 0.457515608820010, 1e-12);
}

TEST(CompositeReward, RejectsOutOfRangeComponents) {
  EXPECT_THROW(composite_reward(1.5, 0.0, 0.0, {}), std::invalid_argument);
  EXPECT_THROW(composite_reward(0.5, 1.5, 0.0, {}), std::invalid_argument);
  EXPECT_THROW(composite_reward(0.5, 0.5, 0.5, {}), std::invalid_argument);
}

TEST(CompositeReward, LinearInEachComponent) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RewardConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const double acc = u(rng), cot = u(rng);
    const double c = u(rng);
    const double base = composite_reward(acc, cot, 1.0, cfg).composite;
    const double scaled = composite_reward(c * acc, cot, 1.0, cfg).composite;
    EXPECT_NEAR(base - scaled, cfg.alpha * acc * (1.0 - c), 1e-12);
  }
}

TEST(CompositeReward, BoundedUnderPaperConstants) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto b = composite_reward(u(rng), u(rng), i % 2, {});
    EXPECT_GE(b.composite, 0.0);
    EXPECT_LE(b.composite, 1.0);
  }
}

}  // namespace
}  // namespace kgen
