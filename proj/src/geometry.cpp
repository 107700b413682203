#include "drivelab/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace drivelab {

namespace {

// Projects the four corners of `box` onto `axis` and returns [min, max].
std::pair<double, double> project(const OrientedBox& box, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < 4; ++i) {
    const double d = axis.dot(box.corner(i));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

std::array<Vec2, 4> axes_of(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 ax = unit_from_angle(a.heading);
  const Vec2 bx = unit_from_angle(b.heading);
  return {ax, rotate90_left(ax), bx, rotate90_left(bx)};
}

}  // namespace

bool overlaps(const OrientedBox& a, const OrientedBox& b) {
  for (const Vec2& axis : axes_of(a, b)) {
    const auto [alo, ahi] = project(a, axis);
    const auto [blo, bhi] = project(b, axis);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

bool overlaps(const OrientedBox& a, const Disc& d) {
  // Closest point on the box to the disc center, in box-local coordinates.
  const Vec2 local = rotated(d.center - a.center, -a.heading);
  const Vec2 clamped{std::clamp(local.x(), -a.half.x(), a.half.x()),
                     std::clamp(local.y(), -a.half.y(), a.half.y())};
  return (local - clamped).squaredNorm() <= d.radius * d.radius;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double separation(const OrientedBox& a, const OrientedBox& b) {
  if (overlaps(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const Vec2 pa = a.corner(i);
    const Vec2 pb = b.corner(i);
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(pa, b.corner(j), b.corner((j + 1) % 4)));
      best = std::min(best, point_segment_distance(pb, a.corner(j), a.corner((j + 1) % 4)));
    }
  }
  return best;
}

double separation(const OrientedBox& a, const Disc& d) {
  const Vec2 local = rotated(d.center - a.center, -a.heading);
  const Vec2 clamped{std::clamp(local.x(), -a.half.x(), a.half.x()),
                     std::clamp(local.y(), -a.half.y(), a.half.y())};
  const double dist = (local - clamped).norm() - d.radius;
  return std::max(dist, 0.0);
}

double signed_clearance(const OrientedBox& a, const OrientedBox& b) {
  if (!overlaps(a, b)) return separation(a, b);
  // Penetration depth: the smallest projected overlap over the SAT axes.
  double depth = std::numeric_limits<double>::infinity();
  for (const Vec2& axis : axes_of(a, b)) {
    const auto [alo, ahi] = project(a, axis);
    const auto [blo, bhi] = project(b, axis);
    depth = std::min(depth, std::min(ahi, bhi) - std::max(alo, blo));
  }
  return -depth;
}

double signed_clearance(const OrientedBox& a, const Disc& d) {
  const Vec2 local = rotated(d.center - a.center, -a.heading);
  const bool inside = std::abs(local.x()) <= a.half.x() && std::abs(local.y()) <= a.half.y();
  if (inside) {
    const double edge = std::min(a.half.x() - std::abs(local.x()),
                                 a.half.y() - std::abs(local.y()));
    return -(edge + d.radius);
  }
  const Vec2 clamped{std::clamp(local.x(), -a.half.x(), a.half.x()),
                     std::clamp(local.y(), -a.half.y(), a.half.y())};
  return (local - clamped).norm() - d.radius;
}

std::optional<double> line_segment_intersection(const Line2& line, const Vec2& a, const Vec2& b) {
  // Signed offsets of the endpoints from the line; a crossing flips the sign.
  const Vec2 n = rotate90_left(line.dir);
  const double da = n.dot(a - line.point);
  const double db = n.dot(b - line.point);
  if ((da > kGeomTol && db > kGeomTol) || (da < -kGeomTol && db < -kGeomTol)) return std::nullopt;
  const double denom = da - db;
  if (std::abs(denom) <= kGeomTol) {
    // Segment (numerically) parallel to the line; treat endpoint contact only.
    if (std::abs(da) <= kGeomTol) return line.dir.dot(a - line.point) / line.dir.squaredNorm();
    return std::nullopt;
  }
  const double s = da / denom;  // position along [a,b]
  const Vec2 p = a + s * (b - a);
  return line.dir.dot(p - line.point) / line.dir.squaredNorm();
}

}  // namespace drivelab
