#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgen/common.hpp"

// Wire grammar for generated outputs:
//   <think>{reasoning}</think><answer><num>{N}</num><point>t,x,y</point>...</answer>
// Exactly N point entries, timesteps strictly increasing, coordinates emitted
// with 2-decimal fixed formatting. Whitespace between tags is tolerated on
// parse and never emitted on serialize.

namespace kgen {

struct OutputPoint {
  int t = 0;
  double x = 0.0;
  double y = 0.0;
};

struct TaggedOutput {
  std::string reasoning;
  int num_declared = 0;
  std::vector<OutputPoint> keypoints;
};

struct ParseResult {
  bool ok = false;
  TaggedOutput value;
  std::string error;  // first violation when !ok
};

inline std::string serialize_output(const TaggedOutput& o) {
  if (o.num_declared != static_cast<int>(o.keypoints.size())) {
    throw std::invalid_argument("serialize_output: num_declared does not match keypoint count");
  }
  for (std::size_t i = 1; i < o.keypoints.size(); ++i) {
    if (o.keypoints[i].t <= o.keypoints[i - 1].t) {
      throw std::invalid_argument("serialize_output: keypoint timesteps not strictly increasing");
    }
  }
  std::string out = "<think>" + o.reasoning + "</think><answer><num>" +
                    std::to_string(o.num_declared) + "</num>";
  for (const auto& p : o.keypoints) {
    out += "<point>" + std::to_string(p.t) + "," + format_fixed(p.x, 2) + "," +
           format_fixed(p.y, 2) + "</point>";
  }
  out += "</answer>";
  return out;
}

namespace detail {

inline void skip_ws(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

inline bool eat(std::string_view s, std::size_t& pos, std::string_view token) {
  if (s.substr(pos, token.size()) != token) return false;
  pos += token.size();
  return true;
}

inline bool parse_double_full(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* c = s.c_str();
  char* end = nullptr;
  out = std::strtod(c, &end);
  if (end == c) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  return true;
}

inline bool parse_int_full(const std::string& s, long& out) {
  if (s.empty()) return false;
  const char* c = s.c_str();
  char* end = nullptr;
  out = std::strtol(c, &end, 10);
  if (end == c) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  return true;
}

}  // namespace detail

inline ParseResult parse_output(const std::string& text) {
  using detail::eat;
  using detail::skip_ws;
  ParseResult res;
  std::string_view s(text);
  std::size_t pos = 0;

  skip_ws(s, pos);
  if (!eat(s, pos, "<think>")) {
    res.error = "missing <think> tag";
    return res;
  }
  const std::size_t think_end = s.find("</think>", pos);
  if (think_end == std::string_view::npos) {
    res.error = "unclosed think tag";
    return res;
  }
  res.value.reasoning = std::string(s.substr(pos, think_end - pos));
  pos = think_end + 8;

  skip_ws(s, pos);
  if (!eat(s, pos, "<answer>")) {
    res.error = "missing <answer> tag";
    return res;
  }
  skip_ws(s, pos);
  if (!eat(s, pos, "<num>")) {
    res.error = "missing <num> tag";
    return res;
  }
  const std::size_t num_end = s.find("</num>", pos);
  if (num_end == std::string_view::npos) {
    res.error = "unclosed num tag";
    return res;
  }
  long num = 0;
  if (!detail::parse_int_full(std::string(s.substr(pos, num_end - pos)), num) || num < 0) {
    res.error = "invalid num payload";
    return res;
  }
  res.value.num_declared = static_cast<int>(num);
  pos = num_end + 6;

  while (true) {
    skip_ws(s, pos);
    if (!eat(s, pos, "<point>")) break;
    const std::size_t point_end = s.find("</point>", pos);
    if (point_end == std::string_view::npos) {
      res.error = "unclosed point tag";
      return res;
    }
    const std::string payload(s.substr(pos, point_end - pos));
    pos = point_end + 8;
    const std::size_t c1 = payload.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : payload.find(',', c1 + 1);
    long t = 0;
    double x = 0.0, y = 0.0;
    if (c2 == std::string::npos ||
        !detail::parse_int_full(payload.substr(0, c1), t) ||
        !detail::parse_double_full(payload.substr(c1 + 1, c2 - c1 - 1), x) ||
        !detail::parse_double_full(payload.substr(c2 + 1), y)) {
      res.error = "invalid point payload: " + payload;
      return res;
    }
    res.value.keypoints.push_back({static_cast<int>(t), x, y});
  }

  skip_ws(s, pos);
  if (!eat(s, pos, "</answer>")) {
    res.error = "unclosed answer tag";
    return res;
  }
  skip_ws(s, pos);
  if (pos != s.size()) {
    res.error = "trailing content after </answer>";
    return res;
  }
  if (res.value.num_declared != static_cast<int>(res.value.keypoints.size())) {
    res.error = "num/count mismatch";
    return res;
  }
  for (std::size_t i = 1; i < res.value.keypoints.size(); ++i) {
    if (res.value.keypoints[i].t <= res.value.keypoints[i - 1].t) {
      res.error = "keypoint timesteps not strictly increasing";
      return res;
    }
  }
  res.ok = true;
  return res;
}

// 1 iff all tags are present and correctly ordered, else 0.
inline int format_reward(const std::string& text) { return parse_output(text).ok ? 1 : 0; }

// Whitespace-delimited token count; the artifact's monotone CoT length measure.
inline int count_tokens(const std::string& text) {
  int n = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++n;
    }
  }
  return n;
}

inline int cot_length(const TaggedOutput& o) { return count_tokens(o.reasoning); }

// Raw-text overload: counts tokens of the think block if one exists, even
// when the full output fails to parse.
inline int cot_length(const std::string& text) {
  const std::size_t open = text.find("<think>");
  if (open == std::string::npos) return 0;
  const std::size_t start = open + 7;
  const std::size_t close = text.find("</think>", start);
  if (close == std::string::npos) return 0;
  return count_tokens(text.substr(start, close - start));
}

// Lenient keypoint salvage for reward computation on format-invalid outputs:
// scans for well-formed <point> payloads, sorts by timestep, drops duplicates.
inline std::vector<OutputPoint> salvage_points(const std::string& text) {
  std::vector<OutputPoint> pts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("<point>", pos);
    if (open == std::string::npos) break;
    const std::size_t close = text.find("</point>", open + 7);
    if (close == std::string::npos) break;
    const std::string payload = text.substr(open + 7, close - open - 7);
    pos = close + 8;
    const std::size_t c1 = payload.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : payload.find(',', c1 + 1);
    long t = 0;
    double x = 0.0, y = 0.0;
    if (c2 != std::string::npos && detail::parse_int_full(payload.substr(0, c1), t) &&
        detail::parse_double_full(payload.substr(c1 + 1, c2 - c1 - 1), x) &&
        detail::parse_double_full(payload.substr(c2 + 1), y)) {
      pts.push_back({static_cast<int>(t), x, y});
    }
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const OutputPoint& a, const OutputPoint& b) { return a.t < b.t; });
  std::vector<OutputPoint> unique;
  for (const auto& p : pts) {
    if (unique.empty() || unique.back().t != p.t) unique.push_back(p);
  }
  return unique;
}

}  // namespace kgen
