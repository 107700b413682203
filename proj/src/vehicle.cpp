#include "drivelab/vehicle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace drivelab {

OrientedBox vehicle_footprint(const State& state, const VehicleSpec& spec) {
  const double heading = state.heading();
  const Vec2 center =
      state.position + (0.5 * spec.length - spec.rear_axle_to_rear) * unit_from_angle(heading);
  return {center, {0.5 * spec.length, 0.5 * spec.width}, heading};
}

OrientedBox obstacle_box(const Obstacle& ob, double t) {
  if (ob.shape == ObstacleShape::Disc) {
    return {ob.position_at(t), {ob.radius, ob.radius}, 0.0};
  }
  return {ob.position_at(t), ob.half_extents, ob.heading_at(t)};
}

State step(const State& state, double steer, const VehicleSpec& spec, double dt) {
  if (!state.position.allFinite() || !state.velocity.allFinite() || !std::isfinite(steer)) {
    throw std::invalid_argument("step: non-finite input");
  }
  const double delta = std::clamp(steer, -spec.max_steer, spec.max_steer);
  const double v = spec.target_speed;
  const double theta = state.heading();

  State next;
  if (std::abs(delta) < 1e-12) {
    next.position = state.position + v * dt * unit_from_angle(theta);
    next.velocity = v * unit_from_angle(theta);
    return next;
  }
  // Exact arc: the rear axle traces a circle of radius wheelbase / tan(delta).
  const double omega = v * std::tan(delta) / spec.wheelbase();
  const double theta1 = theta + omega * dt;
  const double r = v / omega;
  next.position = state.position + r * Vec2{std::sin(theta1) - std::sin(theta),
                                            std::cos(theta) - std::cos(theta1)};
  next.velocity = v * unit_from_angle(theta1);
  return next;
}

bool in_collision(const State& state, const VehicleSpec& spec, const Scenario& scenario,
                  double t) {
  const OrientedBox footprint = vehicle_footprint(state, spec);
  for (const Obstacle& ob : scenario.obstacles) {
    const double reach = footprint.bounding_radius() + ob.bounding_radius();
    if ((ob.position_at(t) - footprint.center).squaredNorm() > reach * reach) continue;
    if (ob.shape == ObstacleShape::Disc) {
      if (overlaps(footprint, Disc{ob.position_at(t), ob.radius})) return true;
    } else {
      if (overlaps(footprint, obstacle_box(ob, t))) return true;
    }
  }
  return false;
}

bool off_road(const State& state, const Scenario& scenario) {
  const Vec2 center = state.position;
  if (scenario.road.kind == RoadKind::OpenGround) {
    return center.x() < 0.0 || center.x() > scenario.road.length || center.y() < 0.0 ||
           center.y() > scenario.road.length;
  }
  return std::abs(signed_lateral_offset(scenario.road, center)) > scenario.road.border_offset();
}

const char* to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Clean: return "Clean";
    case OutcomeKind::Collision: return "Collision";
    case OutcomeKind::RoadDeparture: return "RoadDeparture";
    case OutcomeKind::TargetReached: return "TargetReached";
  }
  return "Unknown";
}

RolloutResult rollout(const Scenario& scenario, const VehicleSpec& spec, const SteerFn& controller,
                      int horizon, const RolloutOptions& opts) {
  if (horizon <= 0) throw std::invalid_argument("rollout: horizon must be positive");

  RolloutResult result;
  Trajectory& traj = result.trajectory;
  traj.dt = opts.dt;
  traj.frame_index_origin = opts.frame_index_origin;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-opts.speed_jitter, opts.speed_jitter);

  State s = scenario.start_state;
  for (std::size_t f = 0; f < static_cast<std::size_t>(horizon); ++f) {
    const double t = (opts.frame_index_origin + static_cast<long>(f)) * opts.dt;
    traj.states.push_back(s);

    if (in_collision(s, spec, scenario, t)) {
      traj.steers.push_back(0.0);
      result.outcome = {OutcomeKind::Collision, f};
      return result;
    }
    if (off_road(s, scenario)) {
      traj.steers.push_back(0.0);
      result.outcome = {OutcomeKind::RoadDeparture, f};
      return result;
    }
    if (scenario.target &&
        (s.position - *scenario.target).norm() <= scenario.target_radius) {
      traj.steers.push_back(0.0);
      result.outcome = {OutcomeKind::TargetReached, f};
      return result;
    }

    const double commanded = controller(s, f);
    if (std::abs(commanded) > spec.max_steer) ++result.saturation_events;
    traj.steers.push_back(std::clamp(commanded, -spec.max_steer, spec.max_steer));

    VehicleSpec step_spec = spec;
    if (opts.speed_jitter > 0.0) step_spec.target_speed = spec.target_speed + jitter(rng);
    s = step(s, commanded, step_spec, opts.dt);
  }
  traj.states.push_back(s);
  traj.steers.push_back(0.0);
  result.outcome = {OutcomeKind::Clean, static_cast<std::size_t>(horizon)};
  return result;
}

}  // namespace drivelab
