#pragma once

#include <functional>
#include <vector>

#include "drivelab/scenario.hpp"
#include "drivelab/state.hpp"

namespace drivelab {

constexpr double kDefaultDt = 0.02;  // 50 Hz

struct VehicleSpec {
  double length = 4.5;
  double width = 2.5;
  double rear_axle_to_rear = 0.75;
  double max_steer = 25.0 * M_PI / 180.0;
  double target_speed = 20.0;

  // Front axle inset is taken equal to the rear one; the dimensions leave a
  // 3.0 m wheelbase.
  double wheelbase() const { return length - 2.0 * rear_axle_to_rear; }
};

// State positions track the rear axle; the footprint is centered accordingly.
OrientedBox vehicle_footprint(const State& state, const VehicleSpec& spec);

OrientedBox obstacle_box(const Obstacle& ob, double t);

// Exact constant-speed kinematic bicycle update over one interval. Steering
// commands beyond max_steer are clamped.
State step(const State& state, double steer, const VehicleSpec& spec, double dt);

bool in_collision(const State& state, const VehicleSpec& spec, const Scenario& scenario,
                  double t);

bool off_road(const State& state, const Scenario& scenario);

struct Trajectory {
  std::vector<State> states;
  std::vector<double> steers;  // steer applied at each state; 0 for the last
  double dt = kDefaultDt;
  long frame_index_origin = 0;

  std::size_t size() const { return states.size(); }
  double time_at(std::size_t k) const { return (frame_index_origin + static_cast<long>(k)) * dt; }
};

enum class OutcomeKind { Clean, Collision, RoadDeparture, TargetReached };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Clean;
  std::size_t frame = 0;
};

const char* to_string(OutcomeKind kind);

// Stateful controllers are allowed; frames are visited in order from 0.
using SteerFn = std::function<double(const State&, std::size_t frame)>;

struct RolloutOptions {
  double dt = kDefaultDt;
  long frame_index_origin = 0;
  double speed_jitter = 0.0;  // uniform +/- jitter on the held speed, 0 disables
  unsigned long long seed = 0;
};

struct RolloutResult {
  Trajectory trajectory;
  Outcome outcome;
  std::size_t saturation_events = 0;
};

RolloutResult rollout(const Scenario& scenario, const VehicleSpec& spec, const SteerFn& controller,
                      int horizon, const RolloutOptions& opts = {});

}  // namespace drivelab
