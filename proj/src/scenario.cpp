#include "drivelab/scenario.hpp"

#include <cmath>

namespace drivelab {

namespace {

void validate_dimensions(const ScenarioSpec& spec) {
  if (spec.lane_width <= 0.0) throw ScenarioError("lane_width must be positive");
  if (spec.shoulder_width < 0.0) throw ScenarioError("shoulder_width must be nonnegative");
  if (spec.length <= 0.0) throw ScenarioError("length must be positive");
  if (spec.kind == RoadKind::Curved) {
    if (spec.curve_radius <= 0.0) throw ScenarioError("curve_radius must be positive");
    if (spec.attach_length <= 0.0) throw ScenarioError("attach_length must be positive");
  }
  if (spec.episode_horizon <= 0) throw ScenarioError("episode_horizon must be positive");
}

}  // namespace

bool point_in_drivable_region(const Scenario& scenario, const Vec2& p) {
  if (scenario.road.kind == RoadKind::OpenGround) {
    return p.x() >= 0.0 && p.x() <= scenario.road.length && p.y() >= 0.0 &&
           p.y() <= scenario.road.length;
  }
  const RoadFrame f = road_frame(scenario.road, p);
  return std::abs(f.lateral) <= scenario.road.border_offset() && f.arc_length >= 0.0 &&
         f.arc_length <= scenario.road.total_length();
}

Scenario build_scenario(const ScenarioSpec& spec) {
  validate_dimensions(spec);

  Scenario scenario;
  scenario.road.kind = spec.kind;
  scenario.road.lane_width = spec.lane_width;
  scenario.road.shoulder_width = spec.shoulder_width;
  scenario.road.curve_radius = spec.curve_radius;
  scenario.road.attach_length = spec.attach_length;
  scenario.road.length = spec.length;
  scenario.episode_horizon = spec.episode_horizon;
  scenario.target_radius = spec.target_radius;

  if (spec.kind == RoadKind::OpenGround) {
    if (!spec.target) throw ScenarioError("open-ground scenario requires a target");
    scenario.target = spec.target;
    scenario.start_state.position = spec.start_position;
    scenario.start_state.velocity = spec.start_speed * unit_from_angle(spec.start_heading);
  } else {
    if (spec.target) throw ScenarioError("target is only valid on open ground");
    const double lane = scenario.road.right_lane_center();
    scenario.start_state.position =
        road_point(scenario.road, spec.start_arc_length, lane + spec.start_lateral);
    const Vec2 tangent = scenario.road.centerline_tangent(spec.start_arc_length);
    scenario.start_state.velocity = spec.start_speed * tangent;
  }

  for (const auto& os : spec.obstacles) {
    Obstacle ob;
    ob.id = os.id;
    ob.shape = os.shape;
    ob.radius = os.radius;
    ob.half_extents = os.half_extents;
    ob.velocity = os.velocity;
    ob.scripted = os.scripted;
    if (spec.kind == RoadKind::OpenGround) {
      ob.position0 = os.position;
      ob.heading = os.scripted ? std::atan2(os.velocity.y(), os.velocity.x()) : 0.0;
    } else {
      const double lane = scenario.road.right_lane_center();
      ob.position0 = road_point(scenario.road, os.arc_length, lane + os.lateral);
      const Vec2 tangent = scenario.road.centerline_tangent(os.arc_length);
      ob.heading = std::atan2(tangent.y(), tangent.x());
    }
    if (!point_in_drivable_region(scenario, ob.position0)) {
      throw ScenarioError("obstacle '" + ob.id + "' lies outside the drivable region");
    }
    scenario.obstacles.push_back(ob);
  }

  if (!point_in_drivable_region(scenario, scenario.start_state.position)) {
    throw ScenarioError("start state lies outside the drivable region");
  }
  return scenario;
}

}  // namespace drivelab
