#pragma once

#include <optional>

#include "drivelab/geometry.hpp"

namespace drivelab {

enum class RoadKind { Straight, Curved, OpenGround };

// Two-lane road described by its centerline (the lane divider). Arc length s
// runs along the travel direction; lateral offsets are positive to the left.
// The curved variant is a half-circle arc joined C1 to a straight run of
// `attach_length` on each end. OpenGround is a borderless square of side
// `length` with no centerline.
struct RoadGeometry {
  RoadKind kind = RoadKind::Straight;
  double lane_width = 3.75;
  double shoulder_width = 3.0;
  double curve_radius = 50.0;
  double attach_length = 100.0;
  double length = 500.0;

  double border_offset() const { return lane_width + shoulder_width; }
  // Lane centers sit half a lane width off the divider; travel lane is the right one.
  double right_lane_center() const { return -0.5 * lane_width; }

  double total_length() const {
    if (kind == RoadKind::Curved) return 2.0 * attach_length + M_PI * curve_radius;
    return length;
  }

  Vec2 centerline_point(double s) const;
  Vec2 centerline_tangent(double s) const;
};

struct RoadFrame {
  double arc_length = 0.0;
  double lateral = 0.0;  // > 0 left of travel direction
};

RoadFrame road_frame(const RoadGeometry& road, const Vec2& p);
double signed_lateral_offset(const RoadGeometry& road, const Vec2& p);
Vec2 road_point(const RoadGeometry& road, double arc_length, double lateral);

struct BorderIntersections {
  Vec2 left;
  Vec2 right;
};

// Nearest crossing of `line` with each road border, tagged by side. Empty when
// the line misses either border (e.g. runs along the corridor).
std::optional<BorderIntersections> road_border_intersections(const RoadGeometry& road,
                                                             const Line2& line);

}  // namespace drivelab
