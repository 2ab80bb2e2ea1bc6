#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgen/kinematics.hpp"
#include "kgen/scenario.hpp"

namespace kgen {

// --- displacement errors ---------------------------------------------------

inline double ade(const std::vector<Vec2>& pred, const std::vector<Vec2>& gt) {
  if (pred.size() != gt.size() || pred.empty()) {
    throw std::invalid_argument("ade: length mismatch or empty input");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - gt[i]).norm();
  return sum / static_cast<double>(pred.size());
}

inline double fde(const std::vector<Vec2>& pred, const std::vector<Vec2>& gt) {
  if (pred.size() != gt.size() || pred.empty()) {
    throw std::invalid_argument("fde: length mismatch or empty input");
  }
  return (pred.back() - gt.back()).norm();
}

// Positions of the evaluated (post-history) segment.
inline std::vector<Vec2> future_positions(const Trajectory& traj, int history_len) {
  std::vector<Vec2> out;
  for (const auto& p : traj.points) {
    if (p.t >= history_len) out.push_back(p.pos());
  }
  return out;
}

inline double ade(const Trajectory& pred, const Trajectory& gt, int history_len = 0) {
  return ade(future_positions(pred, history_len), future_positions(gt, history_len));
}

inline double fde(const Trajectory& pred, const Trajectory& gt, int history_len = 0) {
  return fde(future_positions(pred, history_len), future_positions(gt, history_len));
}

// --- oriented-box collision ------------------------------------------------

struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double half_length = 1.0;
  double half_width = 1.0;
};

// Smallest separating-axis margin over the 4 face normals. Positive values
// are a penetration-depth proxy, negative values bound the gap from below.
inline double boxes_sat_margin(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 axes[4] = {
      {std::cos(a.heading), std::sin(a.heading)},
      {-std::sin(a.heading), std::cos(a.heading)},
      {std::cos(b.heading), std::sin(b.heading)},
      {-std::sin(b.heading), std::cos(b.heading)},
  };
  const Vec2 t = b.center - a.center;
  double margin = std::numeric_limits<double>::infinity();
  for (const Vec2& ax : axes) {
    const double ra = a.half_length * std::abs(axes[0].dot(ax)) +
                      a.half_width * std::abs(axes[1].dot(ax));
    const double rb = b.half_length * std::abs(axes[2].dot(ax)) +
                      b.half_width * std::abs(axes[3].dot(ax));
    margin = std::min(margin, ra + rb - std::abs(t.dot(ax)));
  }
  return margin;
}

// Boundary contact counts as overlap.
inline bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  if (a.half_length <= 0.0 || a.half_width <= 0.0 || b.half_length <= 0.0 ||
      b.half_width <= 0.0) {
    throw std::invalid_argument("boxes_overlap: extents must be positive");
  }
  return boxes_sat_margin(a, b) >= 0.0;
}

// --- scenario collision ----------------------------------------------------

// True iff any unordered agent pair overlaps at any evaluated (post-history)
// timestep. Headings come from finite differences of the predicted
// trajectories; stationary agents fall back to the descriptor heading.
inline bool scenario_collision(const Scenario& s, const std::vector<Trajectory>& predicted) {
  if (predicted.size() != s.agents.size()) {
    throw std::invalid_argument("scenario_collision: one prediction per agent required");
  }
  const int n = static_cast<int>(predicted.size());
  if (n < 2) return false;
  const int steps = predicted[0].size();
  for (const auto& p : predicted) {
    if (p.size() != steps) throw std::invalid_argument("scenario_collision: misaligned lengths");
  }
  std::vector<std::vector<KinematicState>> kin(n);
  for (int i = 0; i < n; ++i) {
    kin[i] = kinematics_from_trajectory(predicted[i], predicted[i].rate,
                                        agent_heading(s.agents[i], s.history_len));
  }
  for (int step = 0; step < steps; ++step) {
    if (predicted[0].points[step].t < s.history_len) continue;
    for (int i = 0; i < n; ++i) {
      OrientedBox bi{predicted[i].position(step), kin[i][step].theta,
                     s.agents[i].descriptor.length / 2.0, s.agents[i].descriptor.width / 2.0};
      for (int j = i + 1; j < n; ++j) {
        OrientedBox bj{predicted[j].position(step), kin[j][step].theta,
                       s.agents[j].descriptor.length / 2.0,
                       s.agents[j].descriptor.width / 2.0};
        if (boxes_overlap(bi, bj)) return true;
      }
    }
  }
  return false;
}

// --- dataset evaluation ------------------------------------------------------

struct AgentError {
  double ade = 0.0;
  double fde = 0.0;
};

struct ScenarioEval {
  std::string id;
  std::vector<AgentError> agents;
  double made = 0.0;
  double mfde = 0.0;
  bool collision = false;
};

struct EvalReport {
  std::vector<ScenarioEval> scenarios;
  std::vector<std::string> excluded;  // scenario ids with missing predictions
  double made = 0.0;                  // mean over agents, then scenarios
  double mfde = 0.0;
  double scr = 0.0;                   // fraction of scenarios with a collision
};

inline EvalReport evaluate(const std::vector<Scenario>& dataset,
                           const std::map<std::string, std::vector<Trajectory>>& predictions) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: empty dataset");
  EvalReport report;
  double sum_ade = 0.0, sum_fde = 0.0;
  int collisions = 0;
  for (const auto& s : dataset) {
    auto it = predictions.find(s.id);
    if (it == predictions.end() || it->second.size() != s.agents.size()) {
      report.excluded.push_back(s.id);
      continue;
    }
    ScenarioEval ev;
    ev.id = s.id;
    double scene_ade = 0.0, scene_fde = 0.0;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      AgentError err;
      err.ade = ade(it->second[i], s.agents[i].trajectory, s.history_len);
      err.fde = fde(it->second[i], s.agents[i].trajectory, s.history_len);
      scene_ade += err.ade;
      scene_fde += err.fde;
      ev.agents.push_back(err);
    }
    ev.made = scene_ade / static_cast<double>(s.agents.size());
    ev.mfde = scene_fde / static_cast<double>(s.agents.size());
    ev.collision = scenario_collision(s, it->second);
    sum_ade += ev.made;
    sum_fde += ev.mfde;
    if (ev.collision) ++collisions;
    report.scenarios.push_back(std::move(ev));
  }
  if (report.scenarios.empty()) {
    throw std::runtime_error("evaluate: no scenario had usable predictions");
  }
  const double n = static_cast<double>(report.scenarios.size());
  report.made = sum_ade / n;
  report.mfde = sum_fde / n;
  report.scr = static_cast<double>(collisions) / n;
  return report;
}

}  // namespace kgen
