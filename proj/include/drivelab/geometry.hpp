#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>

namespace drivelab {

using Vec2 = Eigen::Vector2d;

constexpr double kGeomTol = 1e-9;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline Vec2 rotate90_left(const Vec2& v) { return {-v.y(), v.x()}; }

inline Vec2 rotated(const Vec2& v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

// Axis-aligned footprint rotated by `heading`; `half` holds the half extents
// along the local x (forward) and y (lateral) axes.
struct OrientedBox {
  Vec2 center{0.0, 0.0};
  Vec2 half{0.5, 0.5};
  double heading = 0.0;

  Vec2 corner(int i) const {
    const double sx = (i == 0 || i == 3) ? 1.0 : -1.0;
    const double sy = (i < 2) ? 1.0 : -1.0;
    return center + rotated({sx * half.x(), sy * half.y()}, heading);
  }
  double bounding_radius() const { return half.norm(); }
};

struct Disc {
  Vec2 center{0.0, 0.0};
  double radius = 0.5;
};

bool overlaps(const OrientedBox& a, const OrientedBox& b);
bool overlaps(const OrientedBox& a, const Disc& d);

// Separation distance between footprints: 0 when touching or overlapping.
double separation(const OrientedBox& a, const OrientedBox& b);
double separation(const OrientedBox& a, const Disc& d);

// Signed clearance: separation distance when apart, minus the penetration
// depth when overlapping. Continuous through contact.
double signed_clearance(const OrientedBox& a, const OrientedBox& b);
double signed_clearance(const OrientedBox& a, const Disc& d);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Infinite line through `point` along `dir` (need not be unit length).
struct Line2 {
  Vec2 point{0.0, 0.0};
  Vec2 dir{1.0, 0.0};
};

// Parameter t on the line where it crosses segment [a,b], if it does.
std::optional<double> line_segment_intersection(const Line2& line, const Vec2& a, const Vec2& b);

}  // namespace drivelab
