#pragma once

#include <vector>

#include "drivelab/controllers.hpp"
#include "drivelab/scenario.hpp"
#include "drivelab/vehicle.hpp"

namespace drivelab {

// Point in the agent's referential: a spatial offset (forward, left) plus a
// look-ahead time. (0,0,0) is "here, now".
struct PredictionPoint {
  Vec2 offset{0.0, 0.0};
  double time_ahead = 0.0;
};

struct ExpertParams {
  double smoothing_radius = 2.0;     // clearance at which the field decays to 0
  double full_overlap_depth = 1.0;   // penetration at which the field saturates at 1
  double avoidance_margin = 0.3;     // extra clearance the rollout aims for
  double horizon = 3.0;              // seconds of constant-velocity prediction
  double collision_eps = 1e-6;       // floating-point "> 0" threshold
  // A rollout only counts as a solution if it stays within the road borders
  // plus this margin; dodging across a shoulder is not avoidance.
  double solution_road_margin = 0.5;
  double heading_step = 0.25 * M_PI / 180.0;
  double clear_hold = 0.5;       // seconds of P = 0 before blending back to lane
  double pass_margin = 5.0;      // obstacle counts as passed this far behind
  double solve_extra_time = 1.0;  // keep rolling this long after passing
  double solve_time_cap = 10.0;
  double prediction_dt = kDefaultDt;
};

struct VelocityProposal {
  Vec2 velocity{0.0, 0.0};
  double heading_change = 0.0;
  double probability = 0.0;  // trajectory collision probability of the choice
};

// Smooth clearance-based collision-probability field over a fixed scenario.
// Immutable and safe to share across threads.
class CollisionField {
 public:
  CollisionField(const Scenario& scenario, const VehicleSpec& vehicle, ExpertParams params)
      : scenario_(&scenario), vehicle_(vehicle), params_(params) {}

  // p(s, x): probability that the footprint displaced to x overlaps any
  // obstacle extrapolated to now + time_ahead. 1 at contact/overlap, 0 beyond
  // smoothing_radius clearance, linear in clearance in between.
  double probability(const State& state, const PredictionPoint& x, double t_now = 0.0) const;

  // P(s): max of p over prediction points spanning the constant-velocity
  // future trajectory, sampled every prediction_dt up to the horizon.
  double trajectory_probability(const State& state, double t_now = 0.0) const;

  // Minimizes P over the one-step reachable heading cone at target speed.
  // Ties prefer the smaller heading change, then the smaller deviation from
  // the road direction (or target bearing), then the side with more room.
  VelocityProposal propose_velocity(const State& state, double t_now = 0.0) const;

  const ExpertParams& params() const { return params_; }
  const Scenario& scenario() const { return *scenario_; }
  const VehicleSpec& vehicle() const { return vehicle_; }

 private:
  const Scenario* scenario_;
  VehicleSpec vehicle_;
  ExpertParams params_;
};

// Collision-free replanning from an arbitrary start state: greedy velocity
// proposals while the predicted probability is positive, blending back to
// lane-following (or target-seeking) once clear. Stops after passing all
// obstacles plus solve_extra_time, or at the time cap.
Trajectory expert_rollout(const CollisionField& field, const State& start,
                          long frame_index_origin = 0, int max_steps = -1);

// Frames whose instantaneous collision probability exceeds the epsilon
// threshold: { k : p(s_k, (0,0,0)) > eps }.
std::vector<std::size_t> coll(const CollisionField& field, const Trajectory& traj);

// Full expert policy: avoidance proposal when endangered, reference
// lane-following/target-seeking steer otherwise. This is the pi* queried by
// the interactive learners and executed by expert_rollout.
double expert_steer(const CollisionField& field, const State& state, double t_now);

}  // namespace drivelab
