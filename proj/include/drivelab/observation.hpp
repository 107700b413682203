#pragma once

#include <Eigen/Core>
#include <deque>

#include "drivelab/scenario.hpp"
#include "drivelab/state.hpp"
#include "drivelab/vehicle.hpp"

namespace drivelab {

struct ObservationParams {
  int ray_count = 15;
  double fov = 120.0 * M_PI / 180.0;  // rays span +/- 60 degrees
  double max_range = 50.0;
  // Fixed affine normalization applied when assembling model inputs.
  double lateral_scale = 7.0;
  double heading_scale = M_PI / 2.0;
  double speed_scale = 30.0;

  int dim() const { return ray_count + 3; }
};

// Low-dimensional stand-in for the camera image: forward ray clearances plus
// lane-relative pose and speed.
struct Observation {
  Eigen::VectorXd rays;         // clearance per ray, max-range clipped, sorted by angle
  double lateral_offset = 0.0;  // 0 on open ground
  double heading_error = 0.0;   // vs lane tangent, or target bearing on open ground
  double speed = 0.0;
};

Observation encode_observation(const Scenario& scenario, const VehicleSpec& vehicle,
                               const State& state, double t, const ObservationParams& params);

// Distance from `origin` along `dir` (unit) to the nearest obstacle at time t.
double cast_ray(const Scenario& scenario, const Vec2& origin, const Vec2& dir, double t,
                double max_range);

Eigen::VectorXd normalize_observation(const Observation& obs, const ObservationParams& params);

// Sliding window of the last 5 observations, oldest first; the first push
// fills the window by repetition.
class ObservationWindow {
 public:
  static constexpr int kLength = 5;

  void push(const Observation& obs);
  bool warm() const { return !window_.empty(); }
  void reset() { window_.clear(); }
  const std::deque<Observation>& entries() const { return window_; }

  Eigen::VectorXd flatten_normalized(const ObservationParams& params) const;

 private:
  std::deque<Observation> window_;
};

// Window built from a single static snapshot (all five entries identical).
Eigen::VectorXd snapshot_window(const Observation& obs, const ObservationParams& params);

}  // namespace drivelab
