#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "toponav/world.hpp"

namespace toponav {

// Classic boundary-matched DTW with Euclidean point cost and
// {match, insert, delete} moves.
inline double dtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r) {
  if (p.empty() || r.empty()) throw std::invalid_argument("dtw: empty path");
  const std::size_t n = p.size(), m = r.size();
  std::vector<double> prev(m), curr(m);
  auto cost = [&](std::size_t i, std::size_t j) { return distance(p[i], r[j]); };

  prev[0] = cost(0, 0);
  for (std::size_t j = 1; j < m; ++j) prev[j] = prev[j - 1] + cost(0, j);
  for (std::size_t i = 1; i < n; ++i) {
    curr[0] = prev[0] + cost(i, 0);
    for (std::size_t j = 1; j < m; ++j)
      curr[j] = cost(i, j) + std::min({prev[j - 1], prev[j], curr[j - 1]});
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

// exp(-DTW / (|R| * d_th)); 1 iff the paths align exactly.
inline double ndtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r, double d_th = 3.0) {
  return std::exp(-dtw(p, r) / (static_cast<double>(r.size()) * d_th));
}

enum class DistanceMode { Geodesic, Euclidean };

struct EpisodeResult {
  double tl = 0.0;     // trajectory length
  double ne = 0.0;     // navigation error at the final pose
  int sr = 0;          // success: NE < success radius
  int osr = 0;         // oracle success over the whole trace
  double spl = 0.0;    // success weighted by path length
  double ndtw = 0.0;
  double sdtw = 0.0;   // SR * NDTW
  long at = 0;         // actions taken
  long rt = 0;         // rotations taken
  long ct = 0;         // collision count
  double sg_ne = 0.0;  // mean subgoal navigation error over plan executions
};

struct TraceStats {
  long actions = 0;
  long rotations = 0;
  long collisions = 0;
  // (pose after plan execution, selected goal-node position) per execution
  std::vector<std::pair<Vec2, Vec2>> subgoal_pairs;
};

// Per-episode evaluation. path_points is the full pose sequence starting at
// the start position. NE/OSR use the geodesic convention by default; the
// Euclidean variant stays behind the mode flag for sensitivity checks.
// geodesic_radius is the chassis radius so distances follow space the agent
// can actually traverse (the navigation-mesh convention); slits narrower
// than the chassis do not shortcut the metric.
inline EpisodeResult episode_metrics(const std::vector<Vec2>& path_points,
                                     const OccupancyGrid& grid, const Vec2& start,
                                     const Vec2& goal, const std::vector<Vec2>& reference,
                                     const TraceStats& stats, double success_radius = 3.0,
                                     DistanceMode mode = DistanceMode::Geodesic,
                                     double geodesic_radius = 0.0) {
  if (path_points.empty()) throw std::invalid_argument("episode_metrics: empty trace");
  if (reference.empty()) throw std::invalid_argument("episode_metrics: empty reference");

  EpisodeResult res;
  for (std::size_t i = 1; i < path_points.size(); ++i)
    res.tl += distance(path_points[i - 1], path_points[i]);

  double shortest = 0.0;
  if (mode == DistanceMode::Geodesic) {
    const GeodesicField field(grid, goal, geodesic_radius);
    res.ne = field.distance_to(path_points.back());
    double best = kInfDistance;
    for (const auto& p : path_points) best = std::min(best, field.distance_to(p));
    res.osr = best < success_radius ? 1 : 0;
    shortest = field.distance_to(start);
  } else {
    res.ne = distance(path_points.back(), goal);
    double best = kInfDistance;
    for (const auto& p : path_points) best = std::min(best, distance(p, goal));
    res.osr = best < success_radius ? 1 : 0;
    shortest = distance(start, goal);
  }
  res.sr = res.ne < success_radius ? 1 : 0;

  const double denom = std::max(res.tl, shortest);
  res.spl = denom > 0.0 ? res.sr * shortest / denom : static_cast<double>(res.sr);
  res.ndtw = ndtw(path_points, reference, success_radius);
  res.sdtw = res.sr * res.ndtw;

  res.at = stats.actions;
  res.rt = stats.rotations;
  res.ct = stats.collisions;
  if (!stats.subgoal_pairs.empty()) {
    double sum = 0.0;
    for (const auto& [pose, node_pos] : stats.subgoal_pairs) {
      // Point-level geodesic: a controller diagnostic, not a traversal
      // metric, and ghost targets may sit off traversable space anyway.
      // Straight-line fallback when the geodesic is undefined.
      double d = kInfDistance;
      if (mode == DistanceMode::Geodesic && !grid.occupied_at(node_pos))
        d = GeodesicField(grid, node_pos, 0.0).distance_to(pose);
      if (d == kInfDistance) d = distance(pose, node_pos);
      sum += d;
    }
    res.sg_ne = sum / static_cast<double>(stats.subgoal_pairs.size());
  }
  return res;
}

}  // namespace toponav
