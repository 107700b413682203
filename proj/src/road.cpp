#include "drivelab/road.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

namespace drivelab {

namespace {

struct Piece {
  double s_begin;
  double s_end;
};

}  // namespace

Vec2 RoadGeometry::centerline_point(double s) const {
  assert(kind != RoadKind::OpenGround);
  if (kind == RoadKind::Straight) return {s, 0.0};
  const double a = attach_length;
  const double arc = M_PI * curve_radius;
  if (s <= a) return {s, 0.0};
  if (s <= a + arc) {
    const double theta = (s - a) / curve_radius;
    const Vec2 center{a, curve_radius};
    return center + curve_radius * Vec2{std::sin(theta), -std::cos(theta)};
  }
  const double d = s - a - arc;
  return {a - d, 2.0 * curve_radius};
}

Vec2 RoadGeometry::centerline_tangent(double s) const {
  assert(kind != RoadKind::OpenGround);
  if (kind == RoadKind::Straight) return {1.0, 0.0};
  const double a = attach_length;
  const double arc = M_PI * curve_radius;
  if (s <= a) return {1.0, 0.0};
  if (s <= a + arc) {
    const double theta = (s - a) / curve_radius;
    return {std::cos(theta), std::sin(theta)};
  }
  return {-1.0, 0.0};
}

RoadFrame road_frame(const RoadGeometry& road, const Vec2& p) {
  assert(road.kind != RoadKind::OpenGround);
  if (road.kind == RoadKind::Straight) return {p.x(), p.y()};

  const double a = road.attach_length;
  const double r = road.curve_radius;
  if (p.x() >= a) {
    const Vec2 center{a, r};
    const double dist = (p - center).norm();
    const double theta = std::atan2(p.x() - a, r - p.y());
    return {a + r * theta, r - dist};
  }
  if (p.y() < r) return {p.x(), p.y()};
  return {a + M_PI * r + (a - p.x()), 2.0 * r - p.y()};
}

double signed_lateral_offset(const RoadGeometry& road, const Vec2& p) {
  if (road.kind == RoadKind::OpenGround) return 0.0;
  return road_frame(road, p).lateral;
}

Vec2 road_point(const RoadGeometry& road, double arc_length, double lateral) {
  const Vec2 c = road.centerline_point(arc_length);
  const Vec2 left = rotate90_left(road.centerline_tangent(arc_length));
  return c + lateral * left;
}

namespace {

// Candidate border crossings for one side of the road, as parameters t along
// the query line. `offset` is the signed lateral offset of that border.
void straight_border_candidates(const Line2& line, double y, std::vector<double>& out,
                                double x_min, double x_max) {
  if (std::abs(line.dir.y()) <= kGeomTol) return;
  const double t = (y - line.point.y()) / line.dir.y();
  const double x = line.point.x() + t * line.dir.x();
  if (x >= x_min && x <= x_max) out.push_back(t);
}

void arc_border_candidates(const Line2& line, const Vec2& center, double radius,
                           std::vector<double>& out) {
  // Line-circle intersection in parameter t: |p + t d - c|^2 = radius^2.
  const Vec2 rel = line.point - center;
  const double a = line.dir.squaredNorm();
  const double b = 2.0 * rel.dot(line.dir);
  const double c = rel.squaredNorm() - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  for (const double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
    const Vec2 p = line.point + t * line.dir;
    // Keep the road-side half of the circle only.
    const double ang = std::atan2(p.x() - center.x(), center.y() - p.y());
    if (ang >= -kGeomTol && ang <= M_PI + kGeomTol) out.push_back(t);
  }
}

std::optional<Vec2> nearest_candidate(const Line2& line, const std::vector<double>& ts) {
  if (ts.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (const double t : ts) {
    if (std::abs(t) < best) {
      best = std::abs(t);
      best_t = t;
    }
  }
  return line.point + best_t * line.dir;
}

}  // namespace

std::optional<BorderIntersections> road_border_intersections(const RoadGeometry& road,
                                                             const Line2& line) {
  if (road.kind == RoadKind::OpenGround) return std::nullopt;
  const double b = road.border_offset();
  const double ext = 50.0;  // borders extended past the road ends for off-end queries

  std::vector<double> left_ts, right_ts;
  if (road.kind == RoadKind::Straight) {
    straight_border_candidates(line, b, left_ts, -ext, road.length + ext);
    straight_border_candidates(line, -b, right_ts, -ext, road.length + ext);
  } else {
    const double a = road.attach_length;
    const double r = road.curve_radius;
    const Vec2 center{a, r};
    straight_border_candidates(line, b, left_ts, -ext, a);
    straight_border_candidates(line, -b, right_ts, -ext, a);
    arc_border_candidates(line, center, r - b, left_ts);
    arc_border_candidates(line, center, r + b, right_ts);
    straight_border_candidates(line, 2.0 * r - b, left_ts, -ext, a);
    straight_border_candidates(line, 2.0 * r + b, right_ts, -ext, a);
  }

  const auto left = nearest_candidate(line, left_ts);
  const auto right = nearest_candidate(line, right_ts);
  if (!left || !right) return std::nullopt;
  return BorderIntersections{*left, *right};
}

}  // namespace drivelab
