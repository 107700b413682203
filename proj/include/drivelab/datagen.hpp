#pragma once

#include <optional>
#include <vector>

#include "drivelab/accident.hpp"
#include "drivelab/observation.hpp"

namespace drivelab {

enum class Label { Danger, Safe };

const char* to_string(Label label);

// Perpendicular sweep line at one anchor state of the original trajectory.
// Offsets u are meters along `direction` (the left normal of the anchor
// velocity): l_i marks the furthest solution-trajectory crossing, l_rl > 0 and
// l_rr < 0 the road borders.
struct SweepLine {
  std::size_t anchor_frame = 0;
  State anchor;
  Vec2 direction{0.0, 1.0};
  double l_i = 0.0;
  double l_rl = 0.0;
  double l_rr = 0.0;
  double margin_g = 0.5;
  bool left_avoidance = true;  // l_i >= 0

  Vec2 point_at(double u) const { return anchor.position + u * direction; }
};

struct SweepParams {
  double margin_g = 0.5;
  double u_step = 0.1;
  // Border substitute on open ground, where no road edges exist.
  double corridor_half_width = 10.0;
  // Orientations per point, spread uniformly over +/- orientation_spread.
  int orientation_count = 5;
  double orientation_spread = 2.5 * M_PI / 180.0;
};

std::optional<SweepLine> build_sweep_line(const AccidentRecord& record,
                                          const SolutionSet& solutions, std::size_t k,
                                          const SweepParams& params);

struct InterpolatedVelocity {
  Vec2 velocity{0.0, 0.0};
  bool bilinear = false;
};

// Velocity field reconstructed from the solution fan: bilinear between the
// nearest solution trajectories on opposite sides of the point, linear along
// the single nearest trajectory otherwise. "Closest states" are nearest by
// Euclidean position, ties broken by the earlier frame.
InterpolatedVelocity interpolate_velocity(const SolutionSet& solutions, const Vec2& point);

// Determinant-sign labeling over the swept region; nullopt outside. The
// second form takes the field velocity already interpolated at the point.
std::optional<Label> label_point(const SweepLine& line, double u, const Vec2& orientation,
                                 const SolutionSet& solutions);
std::optional<Label> label_with_velocity(const SweepLine& line, double u, const Vec2& velocity,
                                         const Vec2& orientation);

struct LabeledSample {
  Vec2 position{0.0, 0.0};
  Vec2 orientation{1.0, 0.0};  // unit
  Label label = Label::Safe;
  std::size_t source_frame = 0;
  double offset_u = 0.0;
};

struct DetectionSample {
  LabeledSample meta;
  Eigen::VectorXd window;  // raw observation window, oldest first
};

struct DetectionDataset {
  std::vector<DetectionSample> samples;
  std::size_t lines_skipped = 0;
};

struct RegressionSample {
  Eigen::VectorXd window;
  double steer = 0.0;
};

DetectionDataset generate_detection_dataset(const AnalyzedAccident& accident,
                                            const VehicleSpec& vehicle,
                                            const SweepParams& sweep,
                                            const ObservationParams& obs);

std::vector<RegressionSample> generate_avoidance_dataset(const AnalyzedAccident& accident,
                                                         const VehicleSpec& vehicle,
                                                         const ObservationParams& obs);

struct FollowingOptions {
  int laps = 4;
  double lap_jitter = 0.3;  // seeded initial lateral offset per lap
  int open_ground_samples = 5000;
  unsigned long long seed = 1;
};

std::vector<RegressionSample> generate_following_dataset(const Scenario& scenario,
                                                         const VehicleSpec& vehicle,
                                                         const FollowingOptions& options,
                                                         const ObservationParams& obs);

// Mean pairwise Euclidean distance between (normalized) current observations;
// the dataset-diversity figure used by the regime comparison. Samples at most
// `cap` rows, seeded.
double mean_pairwise_distance(const std::vector<Eigen::VectorXd>& rows, std::size_t cap = 2000,
                              unsigned long long seed = 0);

}  // namespace drivelab
