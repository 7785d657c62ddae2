#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "toponav/grid.hpp"

namespace toponav {

constexpr double kForwardStep = 0.25;   // meters per FORWARD
constexpr double kRotateStep = 15.0;    // degrees per ROTATE
constexpr double kInfDistance = std::numeric_limits<double>::infinity();

enum class Action { Forward, RotateLeft, RotateRight, Stop };
enum class Sliding { Allowed, Forbidden };

struct AgentState {
  Vec2 position;
  double heading_deg = 0.0;       // [0, 360), multiples of kRotateStep once stepped
  double chassis_radius = 0.10;
};

struct RangeScan {
  std::vector<double> ray_headings;  // absolute degrees, first ray = agent heading
  std::vector<double> distances;     // meters, clamped to max_range
  double max_range = 0.0;

  std::size_t size() const { return distances.size(); }
  double spacing_deg() const { return 360.0 / static_cast<double>(ray_headings.size()); }
};

// Distance to the first obstacle cell boundary along the ray (DDA traversal),
// clamped to max_range.
inline double ray_cast(const OccupancyGrid& g, const Vec2& origin, double heading_deg,
                       double max_range) {
  if (g.occupied_at(origin)) throw std::invalid_argument("ray_cast: origin occluded");
  const Vec2 dir = heading_dir(heading_deg);
  int ix = g.cell_x(origin.x);
  int iy = g.cell_y(origin.y);
  const double res = g.resolution();

  const int step_x = dir.x > 0.0 ? 1 : (dir.x < 0.0 ? -1 : 0);
  const int step_y = dir.y > 0.0 ? 1 : (dir.y < 0.0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();

  double t_max_x = inf, t_max_y = inf;
  double t_delta_x = inf, t_delta_y = inf;
  if (step_x != 0) {
    const double edge = g.origin().x + (step_x > 0 ? ix + 1 : ix) * res;
    t_max_x = (edge - origin.x) / dir.x;
    t_delta_x = res / std::fabs(dir.x);
  }
  if (step_y != 0) {
    const double edge = g.origin().y + (step_y > 0 ? iy + 1 : iy) * res;
    t_max_y = (edge - origin.y) / dir.y;
    t_delta_y = res / std::fabs(dir.y);
  }

  while (true) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      ix += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      iy += step_y;
    }
    if (t > max_range) return max_range;
    if (g.occupied(ix, iy)) return t;
  }
}

// Panoramic range scan: n_rays at equal angular spacing starting from the
// agent heading.
inline RangeScan panoramic_scan(const OccupancyGrid& g, const AgentState& state, int n_rays,
                                double max_range) {
  if (n_rays < 12) throw std::invalid_argument("panoramic_scan: n_rays must be >= 12");
  RangeScan scan;
  scan.max_range = max_range;
  scan.ray_headings.reserve(static_cast<std::size_t>(n_rays));
  scan.distances.reserve(static_cast<std::size_t>(n_rays));
  const double spacing = 360.0 / n_rays;
  for (int i = 0; i < n_rays; ++i) {
    const double h = wrap360(state.heading_deg + i * spacing);
    scan.ray_headings.push_back(h);
    scan.distances.push_back(ray_cast(g, state.position, h, max_range));
  }
  return scan;
}

struct StepResult {
  AgentState state;
  bool collided = false;
};

// Executes one low-level action. A blocked FORWARD under Sliding::Forbidden
// leaves the position bit-identical; under Sliding::Allowed the axis
// components of the displacement are applied sequentially where free.
// collided is true iff the full displacement was blocked.
inline StepResult step(const OccupancyGrid& g, const AgentState& state, Action action,
                       Sliding sliding) {
  StepResult out{state, false};
  switch (action) {
    case Action::RotateLeft:
      out.state.heading_deg = wrap360(state.heading_deg + kRotateStep);
      return out;
    case Action::RotateRight:
      out.state.heading_deg = wrap360(state.heading_deg - kRotateStep);
      return out;
    case Action::Stop:
      return out;
    case Action::Forward:
      break;
  }

  const Vec2 disp = heading_dir(state.heading_deg) * kForwardStep;
  const Vec2 target = state.position + disp;
  if (g.segment_free(state.position, target, state.chassis_radius)) {
    out.state.position = target;
    return out;
  }

  out.collided = true;
  if (sliding == Sliding::Forbidden) return out;  // motion cancelled, not truncated

  Vec2 pos = state.position;
  if (disp.x != 0.0) {
    const Vec2 px{pos.x + disp.x, pos.y};
    if (g.segment_free(pos, px, state.chassis_radius)) pos = px;
  }
  if (disp.y != 0.0) {
    const Vec2 py{pos.x, pos.y + disp.y};
    if (g.segment_free(pos, py, state.chassis_radius)) pos = py;
  }
  out.state.position = pos;
  return out;
}

// Single-source shortest distances on the radius-inflated configuration grid,
// 8-connected with diagonal cost sqrt(2) * resolution. Field queries make NE,
// OSR and teacher lookups O(1) after one Dijkstra pass.
class GeodesicField {
 public:
  GeodesicField(const OccupancyGrid& g, const Vec2& source, double radius)
      : grid_(&g), radius_(radius), dist_(static_cast<std::size_t>(g.width()) * g.height(), kInfDistance) {
    if (!g.disc_free(source, radius)) throw std::invalid_argument("geodesic: endpoint occluded");
    build_blocked();
    run(source);
  }

  // Query cells inside the inflation zone (an agent hugging a wall occupies
  // one) relax to the nearest traversable cell plus the straight-line offset.
  double distance_to(const Vec2& p) const {
    const int ix = grid_->cell_x(p.x), iy = grid_->cell_y(p.y);
    if (ix < 0 || iy < 0 || ix >= grid_->width() || iy >= grid_->height()) return kInfDistance;
    if (!blocked_[idx(ix, iy)]) return dist_[idx(ix, iy)];
    const int reach = static_cast<int>(std::ceil(radius_ / grid_->resolution())) + 1;
    double best = kInfDistance;
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const int nx = ix + dx, ny = iy + dy;
        if (nx < 0 || ny < 0 || nx >= grid_->width() || ny >= grid_->height()) continue;
        const std::size_t ni = idx(nx, ny);
        if (blocked_[ni] || dist_[ni] == kInfDistance) continue;
        best = std::min(best, dist_[ni] + distance(grid_->cell_center(nx, ny), p));
      }
    }
    return best;
  }

 private:
  std::size_t idx(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * grid_->width() + static_cast<std::size_t>(ix);
  }

  void build_blocked() {
    const int w = grid_->width(), h = grid_->height();
    blocked_.assign(static_cast<std::size_t>(w) * h, 0);
    for (int iy = 0; iy < h; ++iy)
      for (int ix = 0; ix < w; ++ix)
        if (!grid_->disc_free(grid_->cell_center(ix, iy), radius_)) blocked_[idx(ix, iy)] = 1;
  }

  void run(const Vec2& source) {
    const int w = grid_->width(), h = grid_->height();
    const double res = grid_->resolution();
    const double diag = res * 1.41421356237309515;
    const int sx = grid_->cell_x(source.x), sy = grid_->cell_y(source.y);
    // The exact source point is disc-free even when its cell center is not;
    // treat the source cell as traversable so the field is total on valid inputs.
    blocked_[idx(sx, sy)] = 0;

    using QItem = std::pair<double, std::size_t>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> pq;
    dist_[idx(sx, sy)] = 0.0;
    pq.push({0.0, idx(sx, sy)});
    const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!pq.empty()) {
      const auto [d, i] = pq.top();
      pq.pop();
      if (d > dist_[i]) continue;
      const int ix = static_cast<int>(i % static_cast<std::size_t>(w));
      const int iy = static_cast<int>(i / static_cast<std::size_t>(w));
      for (int k = 0; k < 8; ++k) {
        const int nx = ix + dxs[k], ny = iy + dys[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t ni = idx(nx, ny);
        if (blocked_[ni]) continue;
        const double nd = d + (k < 4 ? res : diag);
        if (nd < dist_[ni]) {
          dist_[ni] = nd;
          pq.push({nd, ni});
        }
      }
    }
  }

  const OccupancyGrid* grid_;
  double radius_;
  std::vector<double> dist_;
  std::vector<std::uint8_t> blocked_;
};

// Shortest obstacle-free path length between two points; +inf when the pair
// is disconnected.
inline double geodesic_distance(const OccupancyGrid& g, const Vec2& a, const Vec2& b,
                                double radius) {
  if (!g.disc_free(b, radius)) throw std::invalid_argument("geodesic: endpoint occluded");
  if (g.cell_x(a.x) == g.cell_x(b.x) && g.cell_y(a.y) == g.cell_y(b.y)) {
    if (!g.disc_free(a, radius)) throw std::invalid_argument("geodesic: endpoint occluded");
    return 0.0;
  }
  GeodesicField field(g, a, radius);
  return field.distance_to(b);
}

}  // namespace toponav
