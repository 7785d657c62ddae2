#pragma once

// Programmatic worlds shared across the test suites. Grid builders work in
// meters; every world has a closed border.

#include <string>

#include "toponav/grid.hpp"

namespace fixtures {

using toponav::OccupancyGrid;
using toponav::Vec2;

inline std::string fixture_path(const std::string& name) {
  return std::string(TOPONAV_FIXTURE_DIR) + "/" + name;
}

// Empty (border-only) world of the given size in meters.
inline OccupancyGrid empty_world(double width_m, double height_m, double res = 0.05) {
  const int w = static_cast<int>(width_m / res + 0.5);
  const int h = static_cast<int>(height_m / res + 0.5);
  OccupancyGrid g(w, h, res);
  for (int ix = 0; ix < w; ++ix) {
    g.set(ix, 0, true);
    g.set(ix, h - 1, true);
  }
  for (int iy = 0; iy < h; ++iy) {
    g.set(0, iy, true);
    g.set(w - 1, iy, true);
  }
  return g;
}

// Marks every cell intersecting [x0,x1) x [y0,y1) as an obstacle. Snapping
// carries an epsilon so exact cell multiples stay exact after the division.
inline void fill_rect(OccupancyGrid& g, double x0, double y0, double x1, double y1) {
  const double res = g.resolution();
  const int ix0 = std::max(0, static_cast<int>(std::floor((x0 - g.origin().x) / res + 1e-7)));
  const int iy0 = std::max(0, static_cast<int>(std::floor((y0 - g.origin().y) / res + 1e-7)));
  const int ix1 =
      std::min(g.width() - 1, static_cast<int>(std::ceil((x1 - g.origin().x) / res - 1e-7)) - 1);
  const int iy1 =
      std::min(g.height() - 1, static_cast<int>(std::ceil((y1 - g.origin().y) / res - 1e-7)) - 1);
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) g.set(ix, iy, true);
}

// 10x10 m world with a solid wall occupying x in [5,6].
inline OccupancyGrid wall_world() {
  OccupancyGrid g = empty_world(10.0, 10.0);
  fill_rect(g, 5.0, 0.0, 6.0, 10.0);
  return g;
}

// Two rooms joined by a single door; the door is the only connection.
inline OccupancyGrid two_rooms() {
  OccupancyGrid g = empty_world(10.0, 6.0);
  fill_rect(g, 4.9, 0.0, 5.1, 2.4);
  fill_rect(g, 4.9, 3.6, 5.1, 6.0);
  return g;
}

// Straight corridor of the given width centered on y = 2.
inline OccupancyGrid corridor(double width_m = 1.5) {
  OccupancyGrid g = empty_world(10.0, 4.0);
  fill_rect(g, 0.0, 0.0, 10.0, 2.0 - width_m / 2.0);
  fill_rect(g, 0.0, 2.0 + width_m / 2.0, 10.0, 4.0);
  return g;
}

// Flat wall strip ahead of an agent standing at (2,1) heading 90 degrees;
// open space on both sides beyond the strip ends.
inline OccupancyGrid flat_wall_ahead() {
  OccupancyGrid g = empty_world(6.0, 4.0);
  fill_rect(g, 1.0, 1.4, 5.0, 1.6);
  return g;
}

// Small pocket the agent cannot leave with a single FORWARD in any direction.
inline OccupancyGrid alcove() {
  OccupancyGrid g = empty_world(4.0, 4.0);
  // cavity around (2,2) with ~0.2 m of free space in every direction
  fill_rect(g, 1.5, 1.5, 2.5, 1.8);
  fill_rect(g, 1.5, 2.2, 2.5, 2.5);
  fill_rect(g, 1.5, 1.5, 1.8, 2.5);
  fill_rect(g, 2.2, 1.5, 2.5, 2.5);
  return g;
}

// Deadlock trap: a wall with a chassis-impassable slit directly ahead of the
// start column and a real door to the left. Rays pass the slit (three free
// cells, 0.15 m), so ghost nodes appear beyond the wall; no chassis disc
// fits through. Start episodes at x = 2.975 so the slit brackets the
// straight-ahead rays.
inline OccupancyGrid slit_trap() {
  OccupancyGrid g = empty_world(5.0, 5.0);
  fill_rect(g, 0.0, 2.0, 0.7, 2.15);    // wall left of the door
  fill_rect(g, 1.6, 2.0, 2.90, 2.15);   // door at [0.7,1.6]; slit at [2.90,3.05]
  fill_rect(g, 3.05, 2.0, 5.0, 2.15);
  return g;
}

}  // namespace fixtures
