#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "toponav/geometry.hpp"

namespace toponav {

// 2D occupancy grid, row-major with cell (0,0) at the world origin corner and
// y increasing upward. ASCII form lists rows top to bottom ('#' obstacle,
// '.' free); boundary cells must be obstacles so the world is closed.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;

  OccupancyGrid(int width, int height, double resolution, Vec2 origin = {0.0, 0.0})
      : w_(width), h_(height), res_(resolution), origin_(origin),
        cells_(static_cast<std::size_t>(width) * height, 0) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("grid: empty matrix");
    if (resolution <= 0.0) throw std::invalid_argument("grid: resolution must be > 0");
  }

  static OccupancyGrid from_ascii(const std::vector<std::string>& rows, double resolution,
                                  Vec2 origin = {0.0, 0.0}) {
    if (rows.empty()) throw std::invalid_argument("grid: empty matrix");
    const std::size_t width = rows.front().size();
    OccupancyGrid g(static_cast<int>(width), static_cast<int>(rows.size()), resolution, origin);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != width)
        throw std::invalid_argument("grid row " + std::to_string(r + 1) + ": expected width " +
                                    std::to_string(width) + ", got " + std::to_string(rows[r].size()));
      for (std::size_t c = 0; c < width; ++c) {
        const char ch = rows[r][c];
        if (ch != '#' && ch != '.')
          throw std::invalid_argument("grid row " + std::to_string(r + 1) + ": invalid cell '" +
                                      std::string(1, ch) + "'");
        // ASCII row 0 is the top of the world.
        const int iy = static_cast<int>(rows.size() - 1 - r);
        g.set(static_cast<int>(c), iy, ch == '#');
      }
    }
    g.check_closed();
    return g;
  }

  std::vector<std::string> to_ascii() const {
    std::vector<std::string> rows(static_cast<std::size_t>(h_), std::string(static_cast<std::size_t>(w_), '.'));
    for (int iy = 0; iy < h_; ++iy)
      for (int ix = 0; ix < w_; ++ix)
        if (occupied(ix, iy)) rows[static_cast<std::size_t>(h_ - 1 - iy)][static_cast<std::size_t>(ix)] = '#';
    return rows;
  }

  int width() const { return w_; }
  int height() const { return h_; }
  double resolution() const { return res_; }
  Vec2 origin() const { return origin_; }
  double extent_x() const { return w_ * res_; }
  double extent_y() const { return h_ * res_; }

  void set(int ix, int iy, bool obstacle) {
    cells_[index(ix, iy)] = obstacle ? 1 : 0;
  }

  // Out-of-bounds counts as obstacle.
  bool occupied(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= w_ || iy >= h_) return true;
    return cells_[index(ix, iy)] != 0;
  }

  int cell_x(double x) const { return static_cast<int>(std::floor((x - origin_.x) / res_)); }
  int cell_y(double y) const { return static_cast<int>(std::floor((y - origin_.y) / res_)); }
  Vec2 cell_center(int ix, int iy) const {
    return {origin_.x + (ix + 0.5) * res_, origin_.y + (iy + 0.5) * res_};
  }

  bool occupied_at(const Vec2& p) const { return occupied(cell_x(p.x), cell_y(p.y)); }

  // True when a chassis disc of the given radius fits at c without touching
  // any obstacle cell. radius == 0 degenerates to the point-in-cell test.
  bool disc_free(const Vec2& c, double radius) const {
    if (radius <= 0.0) return !occupied_at(c);
    const int x0 = cell_x(c.x - radius), x1 = cell_x(c.x + radius);
    const int y0 = cell_y(c.y - radius), y1 = cell_y(c.y + radius);
    const double r2 = radius * radius;
    for (int iy = y0; iy <= y1; ++iy) {
      for (int ix = x0; ix <= x1; ++ix) {
        if (!occupied(ix, iy)) continue;
        const double cx0 = origin_.x + ix * res_, cx1 = cx0 + res_;
        const double cy0 = origin_.y + iy * res_, cy1 = cy0 + res_;
        const double dx = c.x - std::clamp(c.x, cx0, cx1);
        const double dy = c.y - std::clamp(c.y, cy0, cy1);
        if (dx * dx + dy * dy < r2) return false;
      }
    }
    return true;
  }

  // Swept-disc check along the segment a -> b, sampled at resolution/2 steps.
  bool segment_free(const Vec2& a, const Vec2& b, double radius) const {
    const double len = distance(a, b);
    if (!disc_free(a, radius)) return false;
    if (len == 0.0) return true;
    const double step = res_ * 0.5;
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      if (!disc_free({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}, radius)) return false;
    }
    return true;
  }

  bool operator==(const OccupancyGrid& o) const {
    return w_ == o.w_ && h_ == o.h_ && res_ == o.res_ && origin_ == o.origin_ && cells_ == o.cells_;
  }

 private:
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(ix);
  }

  void check_closed() const {
    for (int ix = 0; ix < w_; ++ix)
      if (!occupied(ix, 0) || !occupied(ix, h_ - 1))
        throw std::invalid_argument("grid: boundary must be closed (row edge)");
    for (int iy = 0; iy < h_; ++iy)
      if (!occupied(0, iy) || !occupied(w_ - 1, iy))
        throw std::invalid_argument("grid: boundary must be closed (column edge)");
  }

  int w_ = 0;
  int h_ = 0;
  double res_ = 0.05;
  Vec2 origin_;
  std::vector<std::uint8_t> cells_;
};

}  // namespace toponav
