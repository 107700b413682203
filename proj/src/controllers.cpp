#include "drivelab/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace drivelab {

namespace {

double pursuit_steer_to_point(const Vec2& target, const State& state, const VehicleSpec& spec,
                              double lookahead) {
  const double alpha = wrap_angle(std::atan2(target.y() - state.position.y(),
                                             target.x() - state.position.x()) -
                                  state.heading());
  const double steer = std::atan2(2.0 * spec.wheelbase() * std::sin(alpha), lookahead);
  return std::clamp(steer, -spec.max_steer, spec.max_steer);
}

}  // namespace

double pure_pursuit_steer(const RoadGeometry& road, const State& state, const VehicleSpec& spec,
                          const PurePursuitParams& params) {
  const RoadFrame frame = road_frame(road, state.position);
  const Vec2 target = road_point(road, frame.arc_length + params.lookahead, params.lane_offset);
  return pursuit_steer_to_point(target, state, spec, params.lookahead);
}

double bearing_steer(const Vec2& target, const State& state, const VehicleSpec& spec,
                     double min_lookahead, double max_lookahead) {
  const double dist = (target - state.position).norm();
  const double lookahead = std::clamp(dist, min_lookahead, max_lookahead);
  return pursuit_steer_to_point(target, state, spec, lookahead);
}

SteerFn reference_controller(const Scenario& scenario, const VehicleSpec& spec,
                             double lookahead) {
  if (scenario.road.kind == RoadKind::OpenGround) {
    const Vec2 target = scenario.target.value_or(Vec2{0.0, 0.0});
    return [target, spec](const State& s, std::size_t) { return bearing_steer(target, s, spec); };
  }
  PurePursuitParams params;
  params.lookahead = lookahead;
  params.lane_offset = scenario.road.right_lane_center();
  const RoadGeometry road = scenario.road;
  return [road, spec, params](const State& s, std::size_t) {
    return pure_pursuit_steer(road, s, spec, params);
  };
}

}  // namespace drivelab
