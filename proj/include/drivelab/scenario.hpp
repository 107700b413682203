#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "drivelab/road.hpp"
#include "drivelab/state.hpp"

namespace drivelab {

enum class ObstacleShape { Box, Disc };

// Static or linearly scripted obstacle. A scripted obstacle moves at constant
// velocity from `position0`, which keeps its trajectory defined over any
// episode horizon.
struct Obstacle {
  std::string id;
  ObstacleShape shape = ObstacleShape::Disc;
  Vec2 half_extents{0.5, 0.5};  // Box
  double radius = 0.3;          // Disc
  double heading = 0.0;         // Box, when not moving
  Vec2 position0{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};
  bool scripted = false;

  Vec2 position_at(double t) const {
    return scripted ? Vec2(position0 + t * velocity) : position0;
  }
  double heading_at(double t) const {
    (void)t;
    if (scripted && velocity.squaredNorm() > 0.0) return std::atan2(velocity.y(), velocity.x());
    return heading;
  }
  double bounding_radius() const {
    return shape == ObstacleShape::Disc ? radius : half_extents.norm();
  }
};

struct Scenario {
  RoadGeometry road;
  std::vector<Obstacle> obstacles;
  State start_state;
  std::optional<Vec2> target;  // OpenGround only
  double target_radius = 2.0;
  int episode_horizon = 750;
};

// Declarative scenario description, the unit read from config files.
struct ScenarioSpec {
  RoadKind kind = RoadKind::Straight;
  double lane_width = 3.75;
  double shoulder_width = 3.0;
  double curve_radius = 50.0;
  double attach_length = 100.0;
  double length = 500.0;  // straight-road length, or open-ground side

  struct ObstacleSpec {
    std::string id = "obstacle";
    ObstacleShape shape = ObstacleShape::Disc;
    double radius = 0.3;
    Vec2 half_extents{2.25, 1.25};
    // Road scenarios place obstacles by (arc_length, lateral); open ground by position.
    double arc_length = 150.0;
    double lateral = 0.0;  // relative to the right-lane center
    Vec2 position{0.0, 0.0};
    Vec2 velocity{0.0, 0.0};
    bool scripted = false;
  };
  std::vector<ObstacleSpec> obstacles;

  double start_arc_length = 5.0;
  double start_lateral = 0.0;  // relative to the right-lane center
  Vec2 start_position{100.0, 500.0};
  double start_heading = 0.0;
  double start_speed = 20.0;

  std::optional<Vec2> target;
  double target_radius = 2.0;
  int episode_horizon = 750;
};

struct ScenarioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Scenario build_scenario(const ScenarioSpec& spec);

bool point_in_drivable_region(const Scenario& scenario, const Vec2& p);

}  // namespace drivelab
