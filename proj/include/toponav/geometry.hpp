#pragma once

#include <cmath>

namespace toponav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Vec2& o) const { return !(*this == o); }

  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline double deg_to_rad(double deg) { return deg * (3.14159265358979323846 / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / 3.14159265358979323846); }

// Heading convention: degrees, 0 = +x axis, counterclockwise positive.
inline double wrap360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

// Signed wrap to (-180, 180].
inline double wrap180(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

// Unit direction for a heading; components snapped to exact zero so that
// axis-aligned headings produce axis-aligned displacements.
inline Vec2 heading_dir(double heading_deg) {
  double c = std::cos(deg_to_rad(heading_deg));
  double s = std::sin(deg_to_rad(heading_deg));
  if (std::fabs(c) < 1e-15) c = 0.0;
  if (std::fabs(s) < 1e-15) s = 0.0;
  return {c, s};
}

// Absolute bearing of the segment a -> b, in [0, 360).
inline double bearing_deg(const Vec2& a, const Vec2& b) {
  return wrap360(rad_to_deg(std::atan2(b.y - a.y, b.x - a.x)));
}

// Circular distance between two headings, in [0, 180].
inline double angle_diff_deg(double a, double b) { return std::fabs(wrap180(a - b)); }

struct Pose {
  Vec2 position;
  double heading_deg = 0.0;
};

}  // namespace toponav
