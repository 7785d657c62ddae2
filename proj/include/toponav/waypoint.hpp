#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "toponav/world.hpp"

namespace toponav {

struct HeatmapConfig {
  int angular_bins = 120;     // 3 degrees each by default
  int radial_bins = 12;       // 0.25 m each by default
  double radial_step = 0.25;  // meters per radial bin
  double margin = 0.20;       // one chassis diameter; callers set 2 * chassis_radius
};

// Polar accessibility heatmap, agent-relative: angular bin 0 starts at the
// agent heading, radial bin r is centered at (r + 0.5) * radial_step.
struct PolarHeatmap {
  int angular_bins = 0;
  int radial_bins = 0;
  double radial_step = 0.0;
  std::vector<double> scores;  // [a * radial_bins + r], in [0, 1]

  double score(int a, int r) const { return scores[static_cast<std::size_t>(a) * radial_bins + r]; }
  double& score(int a, int r) { return scores[static_cast<std::size_t>(a) * radial_bins + r]; }
  double bin_heading_deg(int a) const { return (a + 0.5) * (360.0 / angular_bins); }
  double bin_range_m(int r) const { return (r + 0.5) * radial_step; }
};

struct Waypoint {
  double rel_heading_deg = 0.0;  // relative to agent heading, [0, 360)
  double distance_m = 0.0;       // in (0, radial extent]
  std::vector<double> descriptor;
  int source_step = 0;
};

// A cell is scored 1 while its center is at least one chassis diameter inside
// the ray distance at its heading, then decays linearly to 0 at the obstacle.
inline PolarHeatmap build_heatmap(const RangeScan& scan, const HeatmapConfig& cfg) {
  if (scan.size() == 0) throw std::invalid_argument("build_heatmap: empty scan");
  PolarHeatmap map;
  map.angular_bins = cfg.angular_bins;
  map.radial_bins = cfg.radial_bins;
  map.radial_step = cfg.radial_step;
  map.scores.assign(static_cast<std::size_t>(cfg.angular_bins) * cfg.radial_bins, 0.0);

  const int n = static_cast<int>(scan.size());
  const double spacing = 360.0 / n;
  for (int a = 0; a < cfg.angular_bins; ++a) {
    // Conservative range estimate: min of the two rays bracketing the bin center.
    const double rel = map.bin_heading_deg(a);
    const int lo = static_cast<int>(std::floor(rel / spacing)) % n;
    const int hi = (lo + 1) % n;
    const double d = std::min(scan.distances[static_cast<std::size_t>(lo)],
                              scan.distances[static_cast<std::size_t>(hi)]);
    for (int r = 0; r < cfg.radial_bins; ++r) {
      const double rho = map.bin_range_m(r);
      const double s = cfg.margin > 0.0 ? (d - rho) / cfg.margin
                                        : (rho <= d ? 1.0 : 0.0);
      map.score(a, r) = std::clamp(s, 0.0, 1.0);
    }
  }
  return map;
}

// Greedy non-maximum suppression over the heatmap. Ties break toward the
// smaller angle index, then the smaller radius index; suppression removes
// cells within the angular AND radial window of an emitted waypoint. May
// return fewer than K waypoints; emitted scores are always > 0.
inline std::vector<Waypoint> predict_waypoints(const PolarHeatmap& map, int k,
                                               double nms_angle_deg, double nms_radius_m) {
  if (k < 1) throw std::invalid_argument("predict_waypoints: K must be >= 1");
  std::vector<Waypoint> out;
  std::vector<char> suppressed(map.scores.size(), 0);
  while (static_cast<int>(out.size()) < k) {
    int best_a = -1, best_r = -1;
    double best = 0.0;
    for (int a = 0; a < map.angular_bins; ++a) {
      for (int r = 0; r < map.radial_bins; ++r) {
        if (suppressed[static_cast<std::size_t>(a) * map.radial_bins + r]) continue;
        const double s = map.score(a, r);
        if (s > best) {
          best = s;
          best_a = a;
          best_r = r;
        }
      }
    }
    if (best_a < 0) break;  // all remaining scores are zero

    Waypoint wp;
    wp.rel_heading_deg = map.bin_heading_deg(best_a);
    wp.distance_m = map.bin_range_m(best_r);
    out.push_back(wp);

    for (int a = 0; a < map.angular_bins; ++a) {
      const double da = angle_diff_deg(map.bin_heading_deg(a), wp.rel_heading_deg);
      if (da >= nms_angle_deg) continue;
      for (int r = 0; r < map.radial_bins; ++r) {
        if (std::fabs(map.bin_range_m(r) - wp.distance_m) < nms_radius_m)
          suppressed[static_cast<std::size_t>(a) * map.radial_bins + r] = 1;
      }
    }
  }
  return out;
}

// Normalized free-space histogram of the scan sector around a relative
// heading; the geometric stand-in for a view embedding.
inline std::vector<double> sector_descriptor(const RangeScan& scan, double rel_heading_deg,
                                             double sector_deg = 30.0, int buckets = 8) {
  const int n = static_cast<int>(scan.size());
  const double spacing = 360.0 / n;
  std::vector<double> hist(static_cast<std::size_t>(buckets), 0.0);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double rel = i * spacing;
    if (angle_diff_deg(rel, rel_heading_deg) > sector_deg * 0.5) continue;
    const double frac = scan.distances[static_cast<std::size_t>(i)] / scan.max_range;
    int b = static_cast<int>(frac * buckets);
    b = std::clamp(b, 0, buckets - 1);
    hist[static_cast<std::size_t>(b)] += 1.0;
    ++count;
  }
  if (count == 0) {
    // degenerate sector narrower than ray spacing: use the nearest ray
    int nearest = 0;
    double best = 361.0;
    for (int i = 0; i < n; ++i) {
      const double da = angle_diff_deg(i * spacing, rel_heading_deg);
      if (da < best) {
        best = da;
        nearest = i;
      }
    }
    const double frac = scan.distances[static_cast<std::size_t>(nearest)] / scan.max_range;
    hist[static_cast<std::size_t>(std::clamp(static_cast<int>(frac * buckets), 0, buckets - 1))] = 1.0;
    count = 1;
  }
  for (auto& v : hist) v /= count;
  return hist;
}

// Panorama descriptor for the current node: mean of the 12 view-sector
// descriptors.
inline std::vector<double> panorama_descriptor(const RangeScan& scan, int buckets = 8) {
  std::vector<double> mean(static_cast<std::size_t>(buckets), 0.0);
  for (int v = 0; v < 12; ++v) {
    const auto d = sector_descriptor(scan, v * 30.0, 30.0, buckets);
    for (int b = 0; b < buckets; ++b) mean[static_cast<std::size_t>(b)] += d[static_cast<std::size_t>(b)];
  }
  for (auto& v : mean) v /= 12.0;
  return mean;
}

inline Vec2 waypoint_world_position(const AgentState& state, const Waypoint& wp) {
  const Vec2 dir = heading_dir(wrap360(state.heading_deg + wp.rel_heading_deg));
  return state.position + dir * wp.distance_m;
}

struct WaypointEval {
  int count_diff = 0;        // | |predicted| - |reference| |
  double percent_open = 0.0; // fraction of predicted reachable by a straight swept-disc segment
  double chamfer = 0.0;      // symmetric, mean-of-means form
  double hausdorff = 0.0;    // max of directed maxima
};

inline WaypointEval evaluate_waypoints(const std::vector<Vec2>& predicted,
                                       const std::vector<Vec2>& reference,
                                       const OccupancyGrid& grid, const AgentState& pose) {
  if (reference.empty()) throw std::invalid_argument("evaluate_waypoints: empty reference");
  WaypointEval ev;
  ev.count_diff = static_cast<int>(
      std::abs(static_cast<long>(predicted.size()) - static_cast<long>(reference.size())));
  if (predicted.empty()) {
    ev.percent_open = 0.0;
    ev.chamfer = std::numeric_limits<double>::infinity();
    ev.hausdorff = std::numeric_limits<double>::infinity();
    return ev;
  }

  int open = 0;
  for (const auto& p : predicted)
    if (grid.segment_free(pose.position, p, pose.chassis_radius)) ++open;
  ev.percent_open = static_cast<double>(open) / static_cast<double>(predicted.size());

  auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to, double& mean,
                     double& max) {
    mean = 0.0;
    max = 0.0;
    for (const auto& a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : to) best = std::min(best, distance(a, b));
      mean += best;
      max = std::max(max, best);
    }
    mean /= static_cast<double>(from.size());
  };
  double m_pr, x_pr, m_rp, x_rp;
  directed(predicted, reference, m_pr, x_pr);
  directed(reference, predicted, m_rp, x_rp);
  ev.chamfer = 0.5 * (m_pr + m_rp);
  ev.hausdorff = std::max(x_pr, x_rp);
  return ev;
}

}  // namespace toponav
