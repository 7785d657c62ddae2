#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "toponav/geometry.hpp"

namespace toponav {

// Parse/format helpers for the line-oriented scenario, results and trace
// files. All floating-point output goes through fmt_g / fmt_f so files are
// byte-stable across runs and parallelism levels.

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string fmt_f(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ": bad number '" + s + "'");
  }
}

inline long parse_long(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ": bad integer '" + s + "'");
  }
}

inline unsigned long long parse_u64(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ": bad integer '" + s + "'");
  }
}

// "x,y" -> Vec2
inline Vec2 parse_point(const std::string& s, const std::string& ctx) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ParseError(ctx + ": expected x,y, got '" + s + "'");
  return {parse_double(s.substr(0, comma), ctx), parse_double(s.substr(comma + 1), ctx)};
}

// "x,y,heading" -> Pose
inline Pose parse_pose(const std::string& s, const std::string& ctx) {
  const auto c1 = s.find(',');
  const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(',', c1 + 1);
  if (c2 == std::string::npos) throw ParseError(ctx + ": expected x,y,heading, got '" + s + "'");
  Pose p;
  p.position.x = parse_double(s.substr(0, c1), ctx);
  p.position.y = parse_double(s.substr(c1 + 1, c2 - c1 - 1), ctx);
  p.heading_deg = parse_double(s.substr(c2 + 1), ctx);
  return p;
}

struct Field {
  std::string key;
  std::string value;
};

// Splits "key=value key=value ..." where the keys `ref` and `points` consume
// the remainder of the line (their values are space-separated point lists).
inline std::vector<Field> parse_fields(const std::string& s, const std::string& ctx) {
  std::vector<Field> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    const auto eq = s.find('=', i);
    if (eq == std::string::npos) throw ParseError(ctx + ": expected key=value near '" + s.substr(i) + "'");
    const std::string key = s.substr(i, eq - i);
    std::size_t j;
    if (key == "ref" || key == "points") {
      j = s.size();
    } else {
      j = s.find(' ', eq + 1);
      if (j == std::string::npos) j = s.size();
    }
    out.push_back({key, trim(s.substr(eq + 1, j - eq - 1))});
    i = j;
  }
  return out;
}

inline std::vector<Vec2> parse_point_list(const std::string& s, const std::string& ctx) {
  std::vector<Vec2> pts;
  for (const auto& tok : split_ws(s)) pts.push_back(parse_point(tok, ctx));
  return pts;
}

inline std::string fmt_point(const Vec2& p) { return fmt_g(p.x) + "," + fmt_g(p.y); }
inline std::string fmt_pose(const Pose& p) {
  return fmt_g(p.position.x) + "," + fmt_g(p.position.y) + "," + fmt_g(p.heading_deg);
}

}  // namespace toponav
