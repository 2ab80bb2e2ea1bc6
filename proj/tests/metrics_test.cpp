#include "kgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace kgen {
namespace {

using testutil::simple_scenario;
using testutil::straight_trajectory;

TEST(Ade, IdenticalTrajectoriesZero) {
  const auto t = straight_trajectory({0, 0}, {5, 0});
  EXPECT_DOUBLE_EQ(ade(t, t, 10), 0.0);
  EXPECT_DOUBLE_EQ(fde(t, t, 10), 0.0);
}

TEST(Ade, UniformOffsetIsOne) {
  const auto gt = straight_trajectory({0, 0}, {5, 0});
  auto pred = gt;
  for (auto& p : pred.points) p.x += 1.0;
  EXPECT_NEAR(ade(pred, gt, 10), 1.0, 1e-12);
  EXPECT_NEAR(fde(pred, gt, 10), 1.0, 1e-12);
}

TEST(Ade, MatchesBruteForceOracle) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<Vec2> a, b;
    for (int i = 0; i < 50; ++i) {
      a.push_back({n(rng), n(rng)});
      b.push_back({n(rng), n(rng)});
    }
    // independent accumulation
    double sum = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double dx = a[i].x - b[i].x;
      const double dy = a[i].y - b[i].y;
      sum += std::sqrt(dx * dx + dy * dy);
    }
    EXPECT_NEAR(ade(a, b), sum / 50.0, 1e-12);
    const double dx = a.back().x - b.back().x;
    const double dy = a.back().y - b.back().y;
    EXPECT_NEAR(fde(a, b), std::sqrt(dx * dx + dy * dy), 1e-12);
    // bounds: 0 <= ade <= max step distance
    double max_d = 0.0;
    for (int i = 0; i < 50; ++i) {
      max_d = std::max(max_d, (a[i] - b[i]).norm());
    }
    EXPECT_GE(ade(a, b), 0.0);
    EXPECT_LE(ade(a, b), max_d);
  }
}

TEST(Ade, LengthMismatchThrows) {
  std::vector<Vec2> a(5), b(6);
  EXPECT_THROW(ade(a, b), std::invalid_argument);
  EXPECT_THROW(fde(a, b), std::invalid_argument);
}

TEST(BoxesOverlap, SeparatedParallelBoxes) {
  OrientedBox a{{0, 0}, 0.0, 2.25, 1.0};
  OrientedBox b{{10, 0}, 0.0, 2.25, 1.0};
  EXPECT_FALSE(boxes_overlap(a, b));
}

TEST(BoxesOverlap, CloseParallelBoxesOverlap) {
  OrientedBox a{{0, 0}, 0.0, 2.25, 1.0};
  OrientedBox b{{3, 0}, 0.0, 2.25, 1.0};
  EXPECT_TRUE(boxes_overlap(a, b));
}

TEST(BoxesOverlap, IdenticalBoxesOverlap) {
  OrientedBox a{{1, 2}, 0.7, 2.25, 1.0};
  EXPECT_TRUE(boxes_overlap(a, a));
}

TEST(BoxesOverlap, BoundaryContactCounts) {
  OrientedBox a{{0, 0}, 0.0, 1.0, 1.0};
  OrientedBox b{{2.0, 0}, 0.0, 1.0, 1.0};
  EXPECT_TRUE(boxes_overlap(a, b));
}

TEST(BoxesOverlap, InvalidExtentsThrow) {
  OrientedBox a{{0, 0}, 0.0, -1.0, 1.0};
  OrientedBox b{{0, 0}, 0.0, 1.0, 1.0};
  EXPECT_THROW(boxes_overlap(a, b), std::invalid_argument);
}

// Independent containment check used by the sampling oracle.
bool oracle_point_in_box(Vec2 p, const OrientedBox& b) {
  const double c = std::cos(-b.heading), s = std::sin(-b.heading);
  const double lx = c * (p.x - b.center.x) - s * (p.y - b.center.y);
  const double ly = s * (p.x - b.center.x) + c * (p.y - b.center.y);
  return std::abs(lx) <= b.half_length && std::abs(ly) <= b.half_width;
}

// Dense point-sampling containment: interior grid plus fine boundary
// sampling of each box against the other.
bool oracle_boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  auto any_sample_inside = [](const OrientedBox& src, const OrientedBox& dst) {
    const Vec2 ax{std::cos(src.heading), std::sin(src.heading)};
    const Vec2 ay{-std::sin(src.heading), std::cos(src.heading)};
    const int grid = 40;
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        const double u = -1.0 + 2.0 * i / grid;
        const double v = -1.0 + 2.0 * j / grid;
        const Vec2 p = src.center + ax * (u * src.half_length) + ay * (v * src.half_width);
        if (oracle_point_in_box(p, dst)) return true;
      }
    }
    // fine boundary sweep; resolves sliver overlaps past the 1e-3 band
    const int edge_n = 16000;
    for (int i = 0; i <= edge_n; ++i) {
      const double u = -1.0 + 2.0 * i / edge_n;
      const Vec2 p1 = src.center + ax * (u * src.half_length) + ay * src.half_width;
      const Vec2 p2 = src.center + ax * (u * src.half_length) - ay * src.half_width;
      const Vec2 p3 = src.center + ax * src.half_length + ay * (u * src.half_width);
      const Vec2 p4 = src.center - ax * src.half_length + ay * (u * src.half_width);
      if (oracle_point_in_box(p1, dst) || oracle_point_in_box(p2, dst) ||
          oracle_point_in_box(p3, dst) || oracle_point_in_box(p4, dst)) {
        return true;
      }
    }
    return false;
  };
  return any_sample_inside(a, b) || any_sample_inside(b, a);
}

TEST(BoxesOverlap, AgreesWithSamplingOracleOutsideBoundaryBand) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> len(0.3, 2.5);
  int checked = 0;
  int skipped = 0;
  while (checked < 500) {
    OrientedBox a{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    OrientedBox b{{pos(rng), pos(rng)}, ang(rng), len(rng), len(rng)};
    if (std::abs(boxes_sat_margin(a, b)) < 1e-3) {
      ++skipped;  // boundary band
      continue;
    }
    EXPECT_EQ(boxes_overlap(a, b), oracle_boxes_overlap(a, b))
        << "margin=" << boxes_sat_margin(a, b);
    ++checked;
  }
  // the band should be rare
  EXPECT_LT(skipped, 50);
}

TEST(ScenarioCollision, ParallelLanesNoCollision) {
  Scenario s = simple_scenario(2);  // lanes 4 m apart
  s.agents[1].descriptor.p0 = {0.0, 5.0};
  s.agents[1].trajectory = straight_trajectory({0, 5}, {5, 0});
  std::vector<Trajectory> pred = {s.agents[0].trajectory, s.agents[1].trajectory};
  EXPECT_FALSE(scenario_collision(s, pred));
}

TEST(ScenarioCollision, HeadOnCrossingCollides) {
  Scenario s = simple_scenario(1);
  ScenarioAgent other = testutil::make_agent(AgentType::vehicle, {24.5, 0}, {-5, 0});
  s.agents.push_back(other);
  std::vector<Trajectory> pred = {s.agents[0].trajectory, s.agents[1].trajectory};
  EXPECT_TRUE(scenario_collision(s, pred));
}

TEST(ScenarioCollision, SingleAgentNeverCollides) {
  const Scenario s = simple_scenario(1);
  EXPECT_FALSE(scenario_collision(s, {s.agents[0].trajectory}));
}

TEST(ScenarioCollision, MisalignedLengthsThrow) {
  Scenario s = simple_scenario(2);
  std::vector<Trajectory> pred = {s.agents[0].trajectory, straight_trajectory({0, 4}, {5, 0}, 40)};
  EXPECT_THROW(scenario_collision(s, pred), std::invalid_argument);
}

std::vector<Scenario> four_scenarios_one_collision() {
  std::vector<Scenario> out;
  for (int i = 0; i < 4; ++i) {
    Scenario s = simple_scenario(2);
    s.id = "s" + std::to_string(i);
    if (i == 2) {
      // head-on pair
      s.agents[1].descriptor.p0 = {24.5, 0.0};
      s.agents[1].descriptor.v0 = {-5.0, 0.0};
      s.agents[1].trajectory = straight_trajectory({24.5, 0}, {-5, 0});
    } else {
      s.agents[1].descriptor.p0 = {0.0, 6.0 + i};
      s.agents[1].trajectory = straight_trajectory({0, 6.0 + i}, {5, 0});
    }
    out.push_back(s);
  }
  return out;
}

TEST(Evaluate, ScrCountsCollidingScenarios) {
  const auto dataset = four_scenarios_one_collision();
  std::map<std::string, std::vector<Trajectory>> preds;
  for (const auto& s : dataset) {
    preds[s.id] = {s.agents[0].trajectory, s.agents[1].trajectory};
  }
  const auto report = evaluate(dataset, preds);
  EXPECT_DOUBLE_EQ(report.scr, 0.25);
  EXPECT_DOUBLE_EQ(report.made, 0.0);
  EXPECT_DOUBLE_EQ(report.mfde, 0.0);
  EXPECT_TRUE(report.excluded.empty());
}

TEST(Evaluate, MissingPredictionsExcludedAndReported) {
  const auto dataset = four_scenarios_one_collision();
  std::map<std::string, std::vector<Trajectory>> preds;
  for (const auto& s : dataset) {
    if (s.id != "s1") preds[s.id] = {s.agents[0].trajectory, s.agents[1].trajectory};
  }
  const auto report = evaluate(dataset, preds);
  ASSERT_EQ(report.excluded.size(), 1u);
  EXPECT_EQ(report.excluded[0], "s1");
  EXPECT_EQ(report.scenarios.size(), 3u);
}

TEST(Evaluate, EmptyDatasetThrows) {
  EXPECT_THROW(evaluate({}, {}), std::invalid_argument);
}

TEST(Evaluate, PermutationInvariantOverScenarioOrder) {
  auto dataset = four_scenarios_one_collision();
  std::map<std::string, std::vector<Trajectory>> preds;
  std::mt19937_64 rng(47);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const auto& s : dataset) {
    auto p0 = s.agents[0].trajectory;
    auto p1 = s.agents[1].trajectory;
    for (auto& p : p0.points) p.x += n(rng);
    for (auto& p : p1.points) p.y += n(rng);
    preds[s.id] = {p0, p1};
  }
  const auto before = evaluate(dataset, preds);
  std::reverse(dataset.begin(), dataset.end());
  const auto after = evaluate(dataset, preds);
  EXPECT_DOUBLE_EQ(before.made, after.made);
  EXPECT_DOUBLE_EQ(before.mfde, after.mfde);
  EXPECT_DOUBLE_EQ(before.scr, after.scr);
}

}  // namespace
}  // namespace kgen
