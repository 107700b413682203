#include "drivelab/expert.hpp"

#include <algorithm>
#include <cmath>

namespace drivelab {

namespace {

// Linear ramp over signed clearance: 0 beyond the smoothing radius, 1 once the
// footprints interpenetrate by the full-overlap depth.
double clearance_to_probability(double clearance, const ExpertParams& params) {
  const double span = params.smoothing_radius + params.full_overlap_depth;
  return std::clamp((params.smoothing_radius - clearance) / span, 0.0, 1.0);
}

// Signed preference for the side with more lateral room; +1 prefers left.
double preferred_side(const Scenario& scenario, const Vec2& position) {
  if (scenario.road.kind == RoadKind::OpenGround) return 1.0;
  return signed_lateral_offset(scenario.road, position) <= 0.0 ? 1.0 : -1.0;
}

double reference_heading(const Scenario& scenario, const Vec2& position) {
  if (scenario.road.kind == RoadKind::OpenGround) {
    const Vec2 target = scenario.target.value_or(position + Vec2{1.0, 0.0});
    return std::atan2(target.y() - position.y(), target.x() - position.x());
  }
  const RoadFrame frame = road_frame(scenario.road, position);
  const Vec2 tangent = scenario.road.centerline_tangent(frame.arc_length);
  return std::atan2(tangent.y(), tangent.x());
}

}  // namespace

double CollisionField::probability(const State& state, const PredictionPoint& x,
                                   double t_now) const {
  const double heading = state.heading();
  State displaced = state;
  displaced.position = state.position + rotated(x.offset, heading);
  const OrientedBox footprint = vehicle_footprint(displaced, vehicle_);

  const double t = t_now + x.time_ahead;
  double worst = 0.0;
  for (const Obstacle& ob : scenario_->obstacles) {
    const double reach =
        footprint.bounding_radius() + ob.bounding_radius() + params_.smoothing_radius;
    const Vec2 obp = ob.position_at(t);
    if ((obp - footprint.center).squaredNorm() > reach * reach) continue;

    double clearance;
    if (ob.shape == ObstacleShape::Disc) {
      clearance = signed_clearance(footprint, Disc{obp, ob.radius});
    } else {
      clearance = signed_clearance(footprint, obstacle_box(ob, t));
    }
    worst = std::max(worst, clearance_to_probability(clearance, params_));
    if (worst >= 1.0) return 1.0;
  }
  return worst;
}

double CollisionField::trajectory_probability(const State& state, double t_now) const {
  const double speed = state.speed();
  const int steps = static_cast<int>(std::floor(params_.horizon / params_.prediction_dt));
  double worst = 0.0;
  for (int j = 0; j <= steps; ++j) {
    const double dt_ahead = j * params_.prediction_dt;
    const PredictionPoint x{{speed * dt_ahead, 0.0}, dt_ahead};
    worst = std::max(worst, probability(state, x, t_now));
    if (worst >= 1.0) return 1.0;
    if (speed <= 0.0) break;
  }
  return worst;
}

VelocityProposal CollisionField::propose_velocity(const State& state, double t_now) const {
  const double v = vehicle_.target_speed;
  const double theta = state.heading();
  const double max_change =
      v * std::tan(vehicle_.max_steer) / vehicle_.wheelbase() * params_.prediction_dt;
  const int half_count = static_cast<int>(std::floor(max_change / params_.heading_step));

  const double ref = reference_heading(*scenario_, state.position);
  const double side = preferred_side(*scenario_, state.position);
  constexpr double kTie = 1e-12;

  VelocityProposal best;
  bool have_best = false;
  int best_abs_k = 0;
  double best_ref_dev = 0.0;
  for (int k = -half_count; k <= half_count; ++k) {
    const double change = k * params_.heading_step;
    State candidate = state;
    candidate.velocity = v * unit_from_angle(theta + change);
    const double prob = trajectory_probability(candidate, t_now);
    const double ref_dev = std::abs(wrap_angle(theta + change - ref));

    bool better = false;
    if (!have_best) {
      better = true;
    } else if (prob < best.probability - kTie) {
      better = true;
    } else if (prob <= best.probability + kTie) {
      if (std::abs(k) < best_abs_k) {
        better = true;
      } else if (std::abs(k) == best_abs_k) {
        if (ref_dev < best_ref_dev - kTie) {
          better = true;
        } else if (ref_dev <= best_ref_dev + kTie && side * change > side * best.heading_change) {
          better = true;
        }
      }
    }
    if (better) {
      best = {candidate.velocity, change, prob};
      best_abs_k = std::abs(k);
      best_ref_dev = ref_dev;
      have_best = true;
    }
  }
  return best;
}

namespace {

double steer_for_heading_change(double change, const VehicleSpec& vehicle, double dt) {
  // Inverse of the bicycle update: change = v tan(steer) dt / wheelbase.
  const double tan_steer = change * vehicle.wheelbase() / (vehicle.target_speed * dt);
  return std::clamp(std::atan(tan_steer), -vehicle.max_steer, vehicle.max_steer);
}

bool passed_all_obstacles(const Scenario& scenario, const State& state, double t, double margin) {
  const Vec2 dir = state.heading_dir();
  for (const Obstacle& ob : scenario.obstacles) {
    if (dir.dot(ob.position_at(t) - state.position) > -margin) return false;
  }
  return true;
}

}  // namespace

namespace {

// The rollout plans against a slightly inflated field so the executed path
// keeps a strict-interior clearance; riding the exact P = 0 boundary would
// graze the threshold band.
CollisionField planning_field(const CollisionField& field) {
  ExpertParams inflated = field.params();
  inflated.smoothing_radius += inflated.avoidance_margin;
  return CollisionField(field.scenario(), field.vehicle(), inflated);
}

}  // namespace

double expert_steer(const CollisionField& field, const State& state, double t_now) {
  const ExpertParams& params = field.params();
  const CollisionField planner = planning_field(field);
  if (planner.trajectory_probability(state, t_now) > params.collision_eps) {
    return steer_for_heading_change(planner.propose_velocity(state, t_now).heading_change,
                                    field.vehicle(), params.prediction_dt);
  }
  const Scenario& scenario = field.scenario();
  if (scenario.road.kind == RoadKind::OpenGround) {
    const Vec2 target = scenario.target.value_or(state.position + Vec2{1.0, 0.0});
    return bearing_steer(target, state, field.vehicle());
  }
  PurePursuitParams pp;
  pp.lane_offset = scenario.road.right_lane_center();
  return pure_pursuit_steer(scenario.road, state, field.vehicle(), pp);
}

Trajectory expert_rollout(const CollisionField& field, const State& start,
                          long frame_index_origin, int max_steps) {
  const ExpertParams& params = field.params();
  const VehicleSpec& vehicle = field.vehicle();
  const Scenario& scenario = field.scenario();
  const double dt = params.prediction_dt;

  const int cap = static_cast<int>(std::lround(params.solve_time_cap / dt));
  const int steps = max_steps > 0 ? std::min(max_steps, cap) : cap;
  const int hold_frames = static_cast<int>(std::lround(params.clear_hold / dt));
  const int extra_frames = static_cast<int>(std::lround(params.solve_extra_time / dt));

  Trajectory traj;
  traj.dt = dt;
  traj.frame_index_origin = frame_index_origin;

  const CollisionField planner = planning_field(field);
  State s = start;
  int clear_frames = 0;
  int frames_past = -1;
  for (int j = 0; j < steps; ++j) {
    const double t = (frame_index_origin + j) * dt;
    traj.states.push_back(s);

    const double prob = planner.trajectory_probability(s, t);
    const bool passed = passed_all_obstacles(scenario, s, t, params.pass_margin);
    clear_frames = prob > params.collision_eps ? 0 : clear_frames + 1;

    double steer;
    if (prob > params.collision_eps) {
      steer = steer_for_heading_change(planner.propose_velocity(s, t).heading_change, vehicle, dt);
    } else if (passed && clear_frames >= hold_frames) {
      steer = expert_steer(field, s, t);  // blend back to the lane / target course
    } else if (scenario.road.kind != RoadKind::OpenGround) {
      // Quiet field but obstacle still ahead: hold the current lateral offset
      // so the deviation follows the road's curvature. The short lookahead
      // levels residual heading quickly and keeps sharp dodges on the road.
      PurePursuitParams hold;
      hold.lookahead = 4.0;
      hold.lane_offset = signed_lateral_offset(scenario.road, s.position);
      steer = pure_pursuit_steer(scenario.road, s, vehicle, hold);
    } else {
      steer = 0.0;  // hold heading on open ground until the threat is behind
    }
    traj.steers.push_back(steer);
    s = step(s, steer, vehicle, dt);

    if (frames_past < 0 && passed_all_obstacles(scenario, s, t + dt, params.pass_margin)) {
      frames_past = 0;
    }
    if (frames_past >= 0 && ++frames_past >= extra_frames) break;
  }
  traj.states.push_back(s);
  traj.steers.push_back(0.0);
  return traj;
}

std::vector<std::size_t> coll(const CollisionField& field, const Trajectory& traj) {
  std::vector<std::size_t> colliding;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double p = field.probability(traj.states[k], PredictionPoint{}, traj.time_at(k));
    if (p > field.params().collision_eps) colliding.push_back(k);
  }
  return colliding;
}

}  // namespace drivelab
