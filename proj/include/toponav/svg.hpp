#pragma once

#include <ostream>
#include <string>

#include "toponav/trace.hpp"

namespace toponav {

// Renders an episode trace to SVG: obstacles, reference path, executed
// trajectory, waypoints and the final graph snapshot.
inline void write_svg(std::ostream& os, const LoadedTrace& lt, double px_per_m = 60.0) {
  const OccupancyGrid& g = lt.grid;
  const double w = g.extent_x() * px_per_m;
  const double h = g.extent_y() * px_per_m;
  auto sx = [&](double x) { return (x - g.origin().x) * px_per_m; };
  auto sy = [&](double y) { return h - (y - g.origin().y) * px_per_m; };  // flip y

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_g(w) << "\" height=\""
     << fmt_g(h) << "\" viewBox=\"0 0 " << fmt_g(w) << ' ' << fmt_g(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // obstacle cells, merged into horizontal runs per row
  os << "<g fill=\"#30343a\">\n";
  const double cell = g.resolution() * px_per_m;
  for (int iy = 0; iy < g.height(); ++iy) {
    int run = -1;
    for (int ix = 0; ix <= g.width(); ++ix) {
      const bool occ = ix < g.width() && g.occupied(ix, iy);
      if (occ && run < 0) run = ix;
      if (!occ && run >= 0) {
        const double x0 = run * cell;
        const double y0 = h - (iy + 1) * cell;
        os << "<rect x=\"" << fmt_g(x0) << "\" y=\"" << fmt_g(y0) << "\" width=\""
           << fmt_g((ix - run) * cell) << "\" height=\"" << fmt_g(cell) << "\"/>\n";
        run = -1;
      }
    }
  }
  os << "</g>\n";

  auto polyline = [&](const std::vector<Vec2>& pts, const char* stroke, double width,
                      const char* dash) {
    if (pts.size() < 2) return;
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width << '"';
    if (dash[0]) os << " stroke-dasharray=\"" << dash << '"';
    os << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      os << (i ? " " : "") << fmt_g(sx(pts[i].x)) << ',' << fmt_g(sy(pts[i].y));
    os << "\"/>\n";
  };

  polyline(lt.trace.reference, "#e8a13c", 2.0, "6,4");

  std::vector<Vec2> traj{lt.trace.start.position};
  for (const auto& d : lt.trace.decisions)
    for (const auto& a : d.acts) traj.push_back(a.pose_after.position);
  polyline(traj, "#2c7fb8", 2.5, "");

  // final graph snapshot
  if (!lt.trace.decisions.empty()) {
    const DecisionRecord& last = lt.trace.decisions.back();
    os << "<g stroke=\"#9a9a9a\" stroke-width=\"1\">\n";
    for (const auto& e : last.edges) {
      const SnapshotNode* na = nullptr;
      const SnapshotNode* nb = nullptr;
      for (const auto& n : last.nodes) {
        if (n.id == e.a) na = &n;
        if (n.id == e.b) nb = &n;
      }
      if (na && nb)
        os << "<line x1=\"" << fmt_g(sx(na->position.x)) << "\" y1=\"" << fmt_g(sy(na->position.y))
           << "\" x2=\"" << fmt_g(sx(nb->position.x)) << "\" y2=\"" << fmt_g(sy(nb->position.y))
           << "\"/>\n";
    }
    os << "</g>\n";
    for (const auto& n : last.nodes) {
      const char* fill = n.kind == NodeKind::Current ? "#41ab5d"
                         : n.kind == NodeKind::Visited ? "#807dba" : "none";
      os << "<circle cx=\"" << fmt_g(sx(n.position.x)) << "\" cy=\"" << fmt_g(sy(n.position.y))
         << "\" r=\"4\" fill=\"" << fill << "\" stroke=\"#555\"/>\n";
    }
  }

  // start and goal markers
  os << "<circle cx=\"" << fmt_g(sx(lt.trace.start.position.x)) << "\" cy=\""
     << fmt_g(sy(lt.trace.start.position.y)) << "\" r=\"5\" fill=\"#2c7fb8\"/>\n";
  const double gx = sx(lt.trace.goal.x), gy = sy(lt.trace.goal.y);
  os << "<path d=\"M" << fmt_g(gx - 6) << ' ' << fmt_g(gy - 6) << " L" << fmt_g(gx + 6) << ' '
     << fmt_g(gy + 6) << " M" << fmt_g(gx - 6) << ' ' << fmt_g(gy + 6) << " L" << fmt_g(gx + 6)
     << ' ' << fmt_g(gy - 6) << "\" stroke=\"#d7301f\" stroke-width=\"3\"/>\n";
  os << "</svg>\n";
}

}  // namespace toponav
