#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgen/common.hpp"

namespace kgen {

enum class AgentType { vehicle, pedestrian, cyclist };

inline const char* agent_type_name(AgentType t) {
  switch (t) {
    case AgentType::vehicle:
      return "vehicle";
    case AgentType::pedestrian:
      return "pedestrian";
    case AgentType::cyclist:
      return "cyclist";
  }
  return "vehicle";
}

inline AgentType agent_type_from_name(const std::string& s) {
  if (s == "vehicle") return AgentType::vehicle;
  if (s == "pedestrian") return AgentType::pedestrian;
  if (s == "cyclist") return AgentType::cyclist;
  throw std::invalid_argument("unknown agent type: " + s);
}

// Standard simulator footprints; overridable through AgentDescriptor.
inline void default_footprint(AgentType t, double& length, double& width) {
  switch (t) {
    case AgentType::vehicle:
      length = 4.5;
      width = 2.0;
      break;
    case AgentType::cyclist:
      length = 1.8;
      width = 0.6;
      break;
    case AgentType::pedestrian:
      length = 0.6;
      width = 0.6;
      break;
  }
}

struct TrajectoryPoint {
  int t = 0;  // timestep index
  double x = 0.0;
  double y = 0.0;

  Vec2 pos() const { return {x, y}; }
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double rate = 10.0;  // frames per second
  int horizon = 50;    // timestep count for a full trajectory

  int size() const { return static_cast<int>(points.size()); }
  Vec2 position(int idx) const { return points[idx].pos(); }
};

struct AgentDescriptor {
  AgentType type = AgentType::vehicle;
  Vec2 p0;                  // initial position, m
  Vec2 v0;                  // initial velocity, m/s
  double delta_d = 0.0;     // distance to ego, m
  double delta_theta = 0.0; // bearing from ego heading, rad, in [-pi, pi]
  double length = 4.5;      // footprint, m
  double width = 2.0;
};

struct ScenarioAgent {
  AgentDescriptor descriptor;
  Trajectory trajectory;
};

constexpr int kMaxAgents = 8;

// Ego is always agents[0].
struct Scenario {
  std::string id;
  std::vector<ScenarioAgent> agents;
  std::vector<std::vector<Vec2>> map_polylines;
  int history_len = 10;  // timestep count of the observed prefix
};

// Heading used for bearing computations: velocity direction when moving,
// else the first nonzero displacement of the observed history, else 0.
inline double agent_heading(const ScenarioAgent& agent, int history_len) {
  if (agent.descriptor.v0.norm() > 1e-6) {
    return std::atan2(agent.descriptor.v0.y, agent.descriptor.v0.x);
  }
  const auto& pts = agent.trajectory.points;
  const int limit = std::min<int>(history_len, static_cast<int>(pts.size()));
  for (int i = 1; i < limit; ++i) {
    const Vec2 d = pts[i].pos() - pts[i - 1].pos();
    if (d.norm() > 1e-9) return std::atan2(d.y, d.x);
  }
  return 0.0;
}

inline double ego_heading(const Scenario& s) {
  if (s.agents.empty()) throw std::out_of_range("scenario has no agents");
  return agent_heading(s.agents[0], s.history_len);
}

// (delta_d, delta_theta) of an agent relative to the ego start pose.
// Bearing at zero distance is 0 by convention.
inline std::pair<double, double> ego_relative(const Scenario& s, int agent_index) {
  if (agent_index < 0 || agent_index >= static_cast<int>(s.agents.size())) {
    throw std::out_of_range("agent index out of range");
  }
  const Vec2 ego_p = s.agents[0].descriptor.p0;
  const Vec2 d = s.agents[agent_index].descriptor.p0 - ego_p;
  const double dist = d.norm();
  if (dist == 0.0) return {0.0, 0.0};
  const double bearing = wrap_angle(std::atan2(d.y, d.x) - ego_heading(s));
  return {dist, bearing};
}

namespace detail {

inline void validate_trajectory(const Trajectory& traj, const std::string& where,
                                std::vector<std::string>& out) {
  if (static_cast<int>(traj.points.size()) != traj.horizon) {
    out.push_back(where + ": trajectory length " + std::to_string(traj.points.size()) +
                  " does not equal horizon " + std::to_string(traj.horizon));
  }
  int prev_t = -1;
  bool first = true;
  for (const auto& p : traj.points) {
    if (first && p.t != 0) {
      out.push_back(where + ": timestep indices must start at 0");
    }
    if (!first && p.t <= prev_t) {
      out.push_back(where + ": timestep indices not strictly increasing at t=" +
                    std::to_string(p.t));
      break;
    }
    prev_t = p.t;
    first = false;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      out.push_back(where + ": non-finite coordinate at t=" + std::to_string(p.t));
      break;
    }
  }
}

}  // namespace detail

// Violations are data, not failures: an empty report means all invariants hold.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> report;
  const int n = static_cast<int>(s.agents.size());
  if (n < 1) report.push_back("agents: agent count must be at least 1");
  if (n > kMaxAgents) {
    report.push_back("agents: agent count exceeds 8 (got " + std::to_string(n) + ")");
  }
  if (!s.agents.empty()) {
    const double rate = s.agents[0].trajectory.rate;
    const int horizon = s.agents[0].trajectory.horizon;
    if (s.history_len < 0 || s.history_len >= horizon) {
      report.push_back("history_len: must lie in [0, horizon)");
    }
    for (int i = 0; i < n; ++i) {
      const std::string where = "agent " + std::to_string(i);
      const auto& a = s.agents[i];
      if (a.trajectory.rate != rate || a.trajectory.horizon != horizon) {
        report.push_back(where + ": rate/horizon differs from ego trajectory");
      }
      detail::validate_trajectory(a.trajectory, where, report);
      if (a.descriptor.delta_d < 0.0) {
        report.push_back(where + ": delta_d must be >= 0");
      }
      if (a.descriptor.delta_theta < -M_PI || a.descriptor.delta_theta > M_PI) {
        report.push_back(where + ": delta_theta outside [-pi, pi]");
      }
      if (a.descriptor.length <= 0.0 || a.descriptor.width <= 0.0) {
        report.push_back(where + ": footprint extents must be strictly positive");
      }
      if (!std::isfinite(a.descriptor.p0.x) || !std::isfinite(a.descriptor.p0.y) ||
          !std::isfinite(a.descriptor.v0.x) || !std::isfinite(a.descriptor.v0.y)) {
        report.push_back(where + ": non-finite descriptor field");
      }
    }
  }
  return report;
}

// Pose of an agent at the last observed history step; anchors the
// agent-centric frame used by the refiner and the keypoint policy.
inline Pose2 agent_anchor_pose(const Scenario& s, int agent_index) {
  if (agent_index < 0 || agent_index >= static_cast<int>(s.agents.size())) {
    throw std::out_of_range("agent index out of range");
  }
  const auto& agent = s.agents[agent_index];
  const auto& pts = agent.trajectory.points;
  const int last = std::max(0, std::min<int>(s.history_len, static_cast<int>(pts.size())) - 1);
  Pose2 pose;
  pose.position = pts.empty() ? agent.descriptor.p0 : pts[last].pos();
  pose.heading = 0.0;
  if (last > 0) {
    const Vec2 d = pts[last].pos() - pts[last - 1].pos();
    if (d.norm() > 1e-9) {
      pose.heading = std::atan2(d.y, d.x);
      return pose;
    }
  }
  pose.heading = agent_heading(agent, s.history_len);
  return pose;
}

}  // namespace kgen
