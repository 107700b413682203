#pragma once

#include "drivelab/geometry.hpp"

namespace drivelab {

// Planar vehicle state: 2D position plus 2D velocity. Heading is derived from
// the velocity whenever the vehicle is moving.
struct State {
  Vec2 position{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};

  double speed() const { return velocity.norm(); }
  double heading() const { return std::atan2(velocity.y(), velocity.x()); }
  Vec2 heading_dir() const {
    const double v = speed();
    return v > 0.0 ? Vec2(velocity / v) : Vec2(1.0, 0.0);
  }
};

}  // namespace drivelab
