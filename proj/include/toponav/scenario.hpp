#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "toponav/textio.hpp"
#include "toponav/world.hpp"

namespace toponav {

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct RefWaypointSet {
  Pose pose;
  std::vector<Vec2> points;
};

struct EpisodeSpec {
  std::string id;
  Pose start;
  Vec2 goal;
  std::vector<Vec2> reference;  // starts at the start position
  std::vector<RefWaypointSet> ref_waypoints;
};

struct Regime {
  Sliding sliding = Sliding::Allowed;
  double chassis_radius = 0.10;
  int max_goal_predictions = 15;
};

struct Scenario {
  std::string name;
  OccupancyGrid grid;
  Regime regime;
  std::vector<EpisodeSpec> episodes;
};

// Line-oriented scenario format; see docs/FORMATS.md. Validation is strict
// and diagnostics name the offending line.
inline Scenario load_scenario(std::istream& is, const std::string& source = "scenario") {
  Scenario sc;
  double resolution = 0.0;
  Vec2 origin{0.0, 0.0};
  bool have_grid = false;
  std::vector<std::string> grid_rows;

  std::string line;
  int lineno = 0;
  auto ctx = [&](const std::string& what) {
    return source + ":" + std::to_string(lineno) + ": " + what;
  };

  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';') continue;

    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ScenarioError(ctx("expected 'key: value'"));
    const std::string key = t.substr(0, colon);
    const std::string value = trim(t.substr(colon + 1));

    if (key == "name") {
      sc.name = value;
    } else if (key == "resolution") {
      resolution = parse_double(value, ctx("resolution"));
      if (resolution <= 0.0) throw ScenarioError(ctx("resolution must be > 0"));
    } else if (key == "origin") {
      const auto parts = split_ws(value);
      if (parts.size() != 2) throw ScenarioError(ctx("origin expects 'x y'"));
      origin = {parse_double(parts[0], ctx("origin")), parse_double(parts[1], ctx("origin"))};
    } else if (key == "sliding") {
      if (value == "allowed") sc.regime.sliding = Sliding::Allowed;
      else if (value == "forbidden") sc.regime.sliding = Sliding::Forbidden;
      else throw ScenarioError(ctx("sliding must be allowed|forbidden"));
    } else if (key == "chassis_radius") {
      sc.regime.chassis_radius = parse_double(value, ctx("chassis_radius"));
      if (sc.regime.chassis_radius <= 0.0) throw ScenarioError(ctx("chassis_radius must be > 0"));
    } else if (key == "max_goal_predictions") {
      sc.regime.max_goal_predictions = static_cast<int>(parse_long(value, ctx("max_goal_predictions")));
      if (sc.regime.max_goal_predictions < 1)
        throw ScenarioError(ctx("max_goal_predictions must be >= 1"));
    } else if (key == "grid") {
      if (resolution <= 0.0) throw ScenarioError(ctx("resolution must come before grid"));
      while (std::getline(is, line)) {
        ++lineno;
        if (trim(line) == "end") break;
        grid_rows.push_back(line);
      }
      if (grid_rows.empty()) throw ScenarioError(ctx("empty grid block"));
      try {
        sc.grid = OccupancyGrid::from_ascii(grid_rows, resolution, origin);
      } catch (const std::exception& e) {
        throw ScenarioError(source + ": " + e.what());
      }
      have_grid = true;
    } else if (key == "episode") {
      if (!have_grid) throw ScenarioError(ctx("episode before grid"));
      EpisodeSpec ep;
      bool have_start = false, have_goal = false;
      for (const auto& f : parse_fields(value, ctx("episode"))) {
        if (f.key == "id") ep.id = f.value;
        else if (f.key == "start") { ep.start = parse_pose(f.value, ctx("start")); have_start = true; }
        else if (f.key == "goal") { ep.goal = parse_point(f.value, ctx("goal")); have_goal = true; }
        else if (f.key == "ref") ep.reference = parse_point_list(f.value, ctx("ref"));
        else throw ScenarioError(ctx("unknown episode field '" + f.key + "'"));
      }
      if (ep.id.empty()) throw ScenarioError(ctx("episode missing id"));
      if (!have_start) throw ScenarioError(ctx("episode missing start"));
      if (!have_goal) throw ScenarioError(ctx("episode missing goal"));
      if (ep.reference.empty()) throw ScenarioError(ctx("episode missing ref path"));
      if (!sc.grid.disc_free(ep.start.position, sc.regime.chassis_radius))
        throw ScenarioError(ctx("start occluded (episode " + ep.id + ")"));
      // teacher fields are sourced at the goal, so it needs chassis clearance
      if (!sc.grid.disc_free(ep.goal, sc.regime.chassis_radius))
        throw ScenarioError(ctx("goal occluded (episode " + ep.id + ")"));
      if (distance(ep.reference.front(), ep.start.position) > 1e-6)
        throw ScenarioError(ctx("reference path must start at start (episode " + ep.id + ")"));
      for (const auto& other : sc.episodes)
        if (other.id == ep.id) throw ScenarioError(ctx("duplicate episode id " + ep.id));
      sc.episodes.push_back(std::move(ep));
    } else if (key == "refwp") {
      if (!have_grid) throw ScenarioError(ctx("refwp before grid"));
      std::string ep_id;
      RefWaypointSet set;
      bool have_pose = false;
      for (const auto& f : parse_fields(value, ctx("refwp"))) {
        if (f.key == "episode") ep_id = f.value;
        else if (f.key == "pose") { set.pose = parse_pose(f.value, ctx("pose")); have_pose = true; }
        else if (f.key == "points") set.points = parse_point_list(f.value, ctx("points"));
        else throw ScenarioError(ctx("unknown refwp field '" + f.key + "'"));
      }
      if (ep_id.empty() || !have_pose || set.points.empty())
        throw ScenarioError(ctx("refwp needs episode, pose and points"));
      if (!sc.grid.disc_free(set.pose.position, sc.regime.chassis_radius))
        throw ScenarioError(ctx("refwp pose occluded"));
      bool attached = false;
      for (auto& ep : sc.episodes)
        if (ep.id == ep_id) {
          ep.ref_waypoints.push_back(set);
          attached = true;
          break;
        }
      if (!attached) throw ScenarioError(ctx("refwp references unknown episode '" + ep_id + "'"));
    } else {
      throw ScenarioError(ctx("unknown field '" + key + "'"));
    }
  }

  if (!have_grid) throw ScenarioError(source + ": missing grid");
  if (sc.episodes.empty()) throw ScenarioError(source + ": no episodes");
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open scenario file: " + path);
  return load_scenario(f, path);
}

inline void save_scenario(const Scenario& sc, std::ostream& os) {
  os << "name: " << sc.name << '\n';
  os << "resolution: " << fmt_g(sc.grid.resolution()) << '\n';
  os << "origin: " << fmt_g(sc.grid.origin().x) << ' ' << fmt_g(sc.grid.origin().y) << '\n';
  os << "sliding: " << (sc.regime.sliding == Sliding::Allowed ? "allowed" : "forbidden") << '\n';
  os << "chassis_radius: " << fmt_g(sc.regime.chassis_radius) << '\n';
  os << "max_goal_predictions: " << sc.regime.max_goal_predictions << '\n';
  os << "grid:\n";
  for (const auto& row : sc.grid.to_ascii()) os << row << '\n';
  os << "end\n";
  for (const auto& ep : sc.episodes) {
    os << "episode: id=" << ep.id << " start=" << fmt_pose(ep.start)
       << " goal=" << fmt_point(ep.goal) << " ref=";
    for (std::size_t i = 0; i < ep.reference.size(); ++i)
      os << (i ? " " : "") << fmt_point(ep.reference[i]);
    os << '\n';
  }
  for (const auto& ep : sc.episodes)
    for (const auto& set : ep.ref_waypoints) {
      os << "refwp: episode=" << ep.id << " pose=" << fmt_pose(set.pose) << " points=";
      for (std::size_t i = 0; i < set.points.size(); ++i)
        os << (i ? " " : "") << fmt_point(set.points[i]);
      os << '\n';
    }
}

inline std::string scenario_to_string(const Scenario& sc) {
  std::ostringstream os;
  save_scenario(sc, os);
  return os.str();
}

}  // namespace toponav
