#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kgen/scenario.hpp"

namespace kgen {

struct KinematicState {
  double theta = 0.0;  // rad
  double v = 0.0;      // m/s
};

constexpr double kStationaryTol = 1e-12;

// Per-step heading and speed from finite differences:
//   v_t = |p_{t+1} - p_t| * rate, theta_t = atan2 of the displacement.
// The last step replicates the previous value. Zero displacement carries the
// previous heading (seed_theta at sequence start).
inline std::vector<KinematicState> kinematics_from_positions(const std::vector<Vec2>& pos,
                                                             double rate,
                                                             double seed_theta = 0.0) {
  const int n = static_cast<int>(pos.size());
  if (n < 2) throw std::invalid_argument("kinematics: need at least 2 positions");
  std::vector<KinematicState> out(n);
  double prev_theta = seed_theta;
  for (int t = 0; t + 1 < n; ++t) {
    const Vec2 d = pos[t + 1] - pos[t];
    const double dist = d.norm();
    out[t].v = dist * rate;
    out[t].theta = dist > kStationaryTol ? std::atan2(d.y, d.x) : prev_theta;
    prev_theta = out[t].theta;
  }
  out[n - 1] = out[n - 2];
  return out;
}

inline std::vector<KinematicState> kinematics_from_trajectory(const Trajectory& traj,
                                                              double rate,
                                                              double seed_theta = 0.0) {
  std::vector<Vec2> pos;
  pos.reserve(traj.points.size());
  for (const auto& p : traj.points) pos.push_back(p.pos());
  return kinematics_from_positions(pos, rate, seed_theta);
}

}  // namespace kgen
