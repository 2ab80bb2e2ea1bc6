#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgen/scenario.hpp"

// Scenario wire schema:
//   {id, rate, horizon, history_len,
//    agents: [{type, p0:[x,y], v0:[vx,vy], length, width, trajectory:[[t,x,y],...]}],
//    map_polylines: [[[x,y],...],...]}
// Units are meters and seconds. delta_d / delta_theta are derived on load.

namespace kgen {

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  const double rate = s.agents.empty() ? 10.0 : s.agents[0].trajectory.rate;
  const int horizon = s.agents.empty() ? 50 : s.agents[0].trajectory.horizon;
  j["rate"] = rate;
  j["horizon"] = horizon;
  j["history_len"] = s.history_len;
  j["agents"] = nlohmann::ordered_json::array();
  for (const auto& a : s.agents) {
    nlohmann::ordered_json ja;
    ja["type"] = agent_type_name(a.descriptor.type);
    ja["p0"] = {a.descriptor.p0.x, a.descriptor.p0.y};
    ja["v0"] = {a.descriptor.v0.x, a.descriptor.v0.y};
    ja["length"] = a.descriptor.length;
    ja["width"] = a.descriptor.width;
    auto jt = nlohmann::ordered_json::array();
    for (const auto& p : a.trajectory.points) jt.push_back({p.t, p.x, p.y});
    ja["trajectory"] = std::move(jt);
    j["agents"].push_back(std::move(ja));
  }
  j["map_polylines"] = nlohmann::ordered_json::array();
  for (const auto& line : s.map_polylines) {
    auto jl = nlohmann::ordered_json::array();
    for (const auto& v : line) jl.push_back({v.x, v.y});
    j["map_polylines"].push_back(std::move(jl));
  }
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.id = j.at("id").get<std::string>();
  const double rate = j.at("rate").get<double>();
  const int horizon = j.at("horizon").get<int>();
  s.history_len = j.at("history_len").get<int>();
  for (const auto& ja : j.at("agents")) {
    ScenarioAgent a;
    a.descriptor.type = agent_type_from_name(ja.at("type").get<std::string>());
    a.descriptor.p0 = {ja.at("p0")[0].get<double>(), ja.at("p0")[1].get<double>()};
    a.descriptor.v0 = {ja.at("v0")[0].get<double>(), ja.at("v0")[1].get<double>()};
    a.descriptor.length = ja.at("length").get<double>();
    a.descriptor.width = ja.at("width").get<double>();
    a.trajectory.rate = rate;
    a.trajectory.horizon = horizon;
    for (const auto& jp : ja.at("trajectory")) {
      a.trajectory.points.push_back(
          {jp[0].get<int>(), jp[1].get<double>(), jp[2].get<double>()});
    }
    s.agents.push_back(std::move(a));
  }
  for (const auto& jl : j.at("map_polylines")) {
    std::vector<Vec2> line;
    for (const auto& jv : jl) line.push_back({jv[0].get<double>(), jv[1].get<double>()});
    s.map_polylines.push_back(std::move(line));
  }
  // Relative pose fields are not part of the wire format.
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    auto [d, th] = ego_relative(s, static_cast<int>(i));
    s.agents[i].descriptor.delta_d = d;
    s.agents[i].descriptor.delta_theta = th;
  }
  return s;
}

inline void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& s : scenarios) j.push_back(scenario_to_json(s));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

inline std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j;
  in >> j;
  std::vector<Scenario> out;
  for (const auto& js : j) out.push_back(scenario_from_json(js));
  return out;
}

}  // namespace kgen
