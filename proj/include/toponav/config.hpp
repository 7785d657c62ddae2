#pragma once

#include <cstdlib>
#include <functional>
#include <istream>
#include <string>

#include "toponav/episode.hpp"

namespace toponav {

// Runtime configuration layering: built-in defaults, then the config file,
// then TOPONAV_* environment variables, then explicit CLI flags.

inline bool parse_bool(const std::string& v, const std::string& ctx) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ParseError(ctx + ": expected on|off, got '" + v + "'");
}

// Applies one key/value pair; returns false for unknown keys.
inline bool apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string ctx = "config " + key;
  if (key == "gamma") cfg.gamma = parse_double(value, ctx);
  else if (key == "k") cfg.waypoint_k = static_cast<int>(parse_long(value, ctx));
  else if (key == "nms_angle") cfg.nms_angle_deg = parse_double(value, ctx);
  else if (key == "nms_radius") cfg.nms_radius_m = parse_double(value, ctx);
  else if (key == "scan_rays") cfg.scan_rays = static_cast<int>(parse_long(value, ctx));
  else if (key == "max_range") cfg.scan_max_range = parse_double(value, ctx);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, ctx));
  else if (key == "tryout") cfg.tryout = parse_bool(value, ctx);
  else if (key == "delete") cfg.ghost_deletion = parse_bool(value, ctx);
  else if (key == "accumulate") cfg.accumulate = parse_bool(value, ctx);
  else if (key == "action_budget") cfg.action_budget = parse_long(value, ctx);
  else if (key == "max_goals") cfg.max_goal_predictions = static_cast<int>(parse_long(value, ctx));
  else if (key == "chassis_radius") cfg.chassis_override = parse_double(value, ctx);
  else if (key == "weights") cfg.weights_path = value;
  else if (key == "sliding") {
    if (value == "allowed") cfg.sliding_override = Sliding::Allowed;
    else if (value == "forbidden") cfg.sliding_override = Sliding::Forbidden;
    else throw ParseError(ctx + ": expected allowed|forbidden");
  } else if (key == "policy") {
    const auto p = parse_policy(value);
    if (!p) throw ParseError(ctx + ": unknown policy '" + value + "'");
    cfg.policy = *p;
  } else if (key == "select") {
    if (value == "argmax") cfg.select_mode = SelectMode::Argmax;
    else if (value == "sample") cfg.select_mode = SelectMode::Sample;
    else throw ParseError(ctx + ": expected argmax|sample");
  } else if (key == "ne") {
    if (value == "geodesic") cfg.ne_mode = DistanceMode::Geodesic;
    else if (value == "euclidean") cfg.ne_mode = DistanceMode::Euclidean;
    else throw ParseError(ctx + ": expected geodesic|euclidean");
  } else {
    return false;
  }
  return true;
}

// Config file: 'key: value' per line, ';' comments.
inline void apply_config_file(RunConfig& cfg, std::istream& is,
                              const std::string& source = "config") {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key: value'");
    const std::string key = trim(t.substr(0, colon));
    const std::string value = trim(t.substr(colon + 1));
    if (!apply_config_kv(cfg, key, value))
      throw ParseError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

inline const char* const kEnvKeys[] = {
    "gamma", "k", "nms_angle", "nms_radius", "scan_rays", "max_range", "seed",
    "tryout", "delete", "accumulate", "action_budget", "max_goals", "chassis_radius",
    "weights", "sliding", "policy", "select", "ne",
};

// Environment overrides: TOPONAV_<KEY> in upper case, e.g. TOPONAV_GAMMA.
// The lookup function is injectable for tests.
inline void apply_env(RunConfig& cfg,
                      const std::function<const char*(const std::string&)>& getenv_fn =
                          [](const std::string& name) { return std::getenv(name.c_str()); }) {
  for (const char* key : kEnvKeys) {
    std::string env_name = "TOPONAV_";
    for (const char* p = key; *p; ++p) env_name += static_cast<char>(std::toupper(*p));
    if (const char* v = getenv_fn(env_name)) apply_config_kv(cfg, key, v);
  }
}

}  // namespace toponav
