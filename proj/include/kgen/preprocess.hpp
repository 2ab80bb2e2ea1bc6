#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgen/scenario.hpp"

namespace kgen {

struct PreprocessConfig {
  double epsilon = 0.5;  // DP simplification threshold, m
  double delta_v = 1.0;  // per-step speed change threshold, m/s
};

enum class KeypointSource { geometric, kinematic, both };

struct Keypoint {
  int t = 0;
  double x = 0.0;
  double y = 0.0;
  KeypointSource source = KeypointSource::geometric;

  Vec2 pos() const { return {x, y}; }
};

// Timestep-sorted, de-duplicated. Outputs of douglas_peucker and
// extract_keypoints always contain the first and last trajectory timestep;
// a raw kinematic set may be empty.
struct KeypointSet {
  std::vector<Keypoint> entries;

  int size() const { return static_cast<int>(entries.size()); }
  bool contains(int t) const {
    for (const auto& e : entries)
      if (e.t == t) return true;
    return false;
  }
};

namespace detail {

// Perpendicular distance to the infinite line through a and b (classic DP
// chord distance). Falls back to point distance for a degenerate chord.
inline double line_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len < 1e-12) return (p - a).norm();
  return std::abs(ab.cross(p - a)) / len;
}

inline void dp_recurse(const std::vector<TrajectoryPoint>& pts, int lo, int hi,
                       double epsilon, std::vector<bool>& keep) {
  if (hi - lo < 2) return;
  double max_d = -1.0;
  int max_i = -1;
  for (int i = lo + 1; i < hi; ++i) {
    const double d = line_distance(pts[i].pos(), pts[lo].pos(), pts[hi].pos());
    if (d > max_d) {
      max_d = d;
      max_i = i;
    }
  }
  if (max_d > epsilon) {
    keep[max_i] = true;
    dp_recurse(pts, lo, max_i, epsilon, keep);
    dp_recurse(pts, max_i, hi, epsilon, keep);
  }
}

}  // namespace detail

// Geometric keypoints via recursive Douglas-Peucker simplification.
inline KeypointSet douglas_peucker(const Trajectory& traj, double epsilon) {
  if (traj.size() < 2) throw std::invalid_argument("douglas_peucker: trajectory shorter than 2 points");
  if (epsilon <= 0.0) throw std::invalid_argument("douglas_peucker: epsilon must be > 0");
  const auto& pts = traj.points;
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  detail::dp_recurse(pts, 0, static_cast<int>(pts.size()) - 1, epsilon, keep);
  KeypointSet out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) out.entries.push_back({pts[i].t, pts[i].x, pts[i].y, KeypointSource::geometric});
  }
  return out;
}

// Per-step speeds v_t = |p_{t+1} - p_t| * rate, in m/s.
inline std::vector<double> step_speeds(const Trajectory& traj) {
  std::vector<double> v;
  for (int i = 0; i + 1 < traj.size(); ++i) {
    v.push_back((traj.position(i + 1) - traj.position(i)).norm() * traj.rate);
  }
  return v;
}

// Kinematic keypoints: a point at step t whenever |v_t - v_{t-1}| > delta_v.
// The set may be empty (constant-speed motion).
inline KeypointSet kinematic_keypoints(const Trajectory& traj, double delta_v) {
  if (traj.size() < 3) throw std::invalid_argument("kinematic_keypoints: trajectory shorter than 3 points");
  if (delta_v <= 0.0) throw std::invalid_argument("kinematic_keypoints: delta_v must be > 0");
  const std::vector<double> v = step_speeds(traj);
  KeypointSet out;
  for (std::size_t t = 1; t < v.size(); ++t) {
    if (std::abs(v[t] - v[t - 1]) > delta_v) {
      const auto& p = traj.points[t];
      out.entries.push_back({p.t, p.x, p.y, KeypointSource::kinematic});
    }
  }
  return out;
}

// Union of geometric and kinematic sets, de-duplicated by timestep.
// Keypoints keep positions from the original trajectory, never smoothed.
inline KeypointSet extract_keypoints(const Trajectory& traj, const PreprocessConfig& cfg) {
  const KeypointSet geo = douglas_peucker(traj, cfg.epsilon);
  const KeypointSet kin =
      traj.size() >= 3 ? kinematic_keypoints(traj, cfg.delta_v) : KeypointSet{};
  std::map<int, Keypoint> merged;
  for (const auto& e : geo.entries) merged[e.t] = e;
  for (const auto& e : kin.entries) {
    auto it = merged.find(e.t);
    if (it == merged.end()) {
      merged[e.t] = e;
    } else {
      it->second.source = KeypointSource::both;
    }
  }
  KeypointSet out;
  for (const auto& [t, e] : merged) out.entries.push_back(e);
  return out;
}

// Deterministic natural-language scene description, one line per agent:
//   Agent {i}{ (ego)}: {type} at (x, y), velocity (vx, vy) m/s[, distance d m, bearing b rad].
inline std::string serialize_scene(const Scenario& s) {
  const auto report = validate_scenario(s);
  if (!report.empty()) {
    throw std::invalid_argument("serialize_scene: invalid scenario: " + report.front());
  }
  const auto& ego_traj = s.agents[0].trajectory;
  std::string out = "Scene with " + std::to_string(s.agents.size()) + " agents, horizon " +
                    std::to_string(ego_traj.horizon) + " steps at " +
                    format_compact(ego_traj.rate) + " fps.";
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const auto& d = s.agents[i].descriptor;
    out += "\nAgent " + std::to_string(i) + (i == 0 ? " (ego)" : "") + ": " +
           agent_type_name(d.type) + " at (" + format_fixed(d.p0.x, 2) + ", " +
           format_fixed(d.p0.y, 2) + "), velocity (" + format_fixed(d.v0.x, 2) + ", " +
           format_fixed(d.v0.y, 2) + ") m/s";
    if (i != 0) {
      auto [dist, bearing] = ego_relative(s, static_cast<int>(i));
      out += ", distance " + format_fixed(dist, 2) + " m, bearing " +
             format_fixed(bearing, 2) + " rad";
    }
    out += ".";
  }
  return out;
}

// Record format for reasoning annotations; generation is external to this
// library.
struct ReasoningAnnotation {
  std::string road_geometry;
  std::string collision_risks;
  std::string intention;

  bool complete() const {
    return !road_geometry.empty() && !collision_risks.empty() && !intention.empty();
  }
};

}  // namespace kgen
