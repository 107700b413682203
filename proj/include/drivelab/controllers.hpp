#pragma once

#include "drivelab/road.hpp"
#include "drivelab/state.hpp"
#include "drivelab/vehicle.hpp"

namespace drivelab {

struct PurePursuitParams {
  double lookahead = 8.0;
  double lane_offset = 0.0;  // lateral target relative to the centerline
};

// Classic pure pursuit on a lane parallel to the road centerline.
double pure_pursuit_steer(const RoadGeometry& road, const State& state, const VehicleSpec& spec,
                          const PurePursuitParams& params);

// Steers toward a fixed point; used on open ground with the sphere target.
double bearing_steer(const Vec2& target, const State& state, const VehicleSpec& spec,
                     double min_lookahead = 8.0, double max_lookahead = 30.0);

// Reference lane-following/target-seeking controller for a scenario.
SteerFn reference_controller(const Scenario& scenario, const VehicleSpec& spec,
                             double lookahead = 8.0);

}  // namespace drivelab
