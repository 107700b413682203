#include "drivelab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "drivelab/controllers.hpp"

namespace drivelab {

const char* to_string(Label label) { return label == Label::Danger ? "DANGER" : "SAFE"; }

namespace {

// Furthest crossing of the sweep line by any solution trajectory, as a signed
// offset along the line direction. Crossings are detected as sign changes of
// the longitudinal coordinate.
std::optional<double> furthest_crossing(const SolutionSet& solutions, const Line2& line) {
  bool found = false;
  double best = 0.0;
  for (const auto& [k, traj] : solutions.trajectories) {
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
      const auto u = line_segment_intersection(line, traj.states[i].position,
                                               traj.states[i + 1].position);
      if (!u) continue;
      if (!found || std::abs(*u) > std::abs(best)) {
        best = *u;
        found = true;
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

}  // namespace

std::optional<SweepLine> build_sweep_line(const AccidentRecord& record,
                                          const SolutionSet& solutions, std::size_t k,
                                          const SweepParams& params) {
  if (solutions.trajectories.empty()) return std::nullopt;

  SweepLine line;
  line.anchor_frame = k;
  line.anchor = record.trajectory.states.at(k);
  line.direction = rotate90_left(line.anchor.heading_dir());
  line.margin_g = params.margin_g;

  const Line2 query{line.anchor.position, line.direction};
  const auto crossing = furthest_crossing(solutions, query);
  if (!crossing) return std::nullopt;
  line.l_i = *crossing;
  line.left_avoidance = line.l_i >= 0.0;

  if (record.scenario.road.kind == RoadKind::OpenGround) {
    line.l_rl = params.corridor_half_width;
    line.l_rr = -params.corridor_half_width;
  } else {
    const auto borders = road_border_intersections(record.scenario.road, query);
    if (!borders) return std::nullopt;
    line.l_rl = line.direction.dot(borders->left - line.anchor.position);
    line.l_rr = line.direction.dot(borders->right - line.anchor.position);
    if (!(line.l_rr < 0.0 && line.l_rl > 0.0)) return std::nullopt;
  }
  return line;
}

InterpolatedVelocity interpolate_velocity(const SolutionSet& solutions, const Vec2& point) {
  struct PerTrajectory {
    double distance;
    Vec2 velocity;
    int side;
  };
  std::vector<PerTrajectory> per;
  per.reserve(solutions.trajectories.size());

  for (const auto& [k, traj] : solutions.trajectories) {
    if (traj.states.empty()) continue;
    // Two closest states by position; ties keep the earlier frame.
    std::size_t i1 = 0, i2 = 0;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const double d = (traj.states[i].position - point).norm();
      if (d < d1) {
        d2 = d1;
        i2 = i1;
        d1 = d;
        i1 = i;
      } else if (d < d2) {
        d2 = d;
        i2 = i;
      }
    }

    Vec2 v;
    if (!std::isfinite(d2) || d1 + d2 <= 0.0) {
      v = traj.states[i1].velocity;
    } else {
      const double w1 = d2 / (d1 + d2);
      v = w1 * traj.states[i1].velocity + (1.0 - w1) * traj.states[i2].velocity;
    }
    const int side =
        cross2(traj.states[i1].velocity, point - traj.states[i1].position) >= 0.0 ? 1 : -1;
    per.push_back({d1, v, side});
  }

  InterpolatedVelocity out;
  if (per.empty()) return out;

  std::size_t a = 0;
  for (std::size_t i = 1; i < per.size(); ++i) {
    if (per[i].distance < per[a].distance) a = i;
  }
  std::optional<std::size_t> b;
  for (std::size_t i = 0; i < per.size(); ++i) {
    if (per[i].side != per[a].side && (!b || per[i].distance < per[*b].distance)) b = i;
  }

  if (b) {
    const double total = per[a].distance + per[*b].distance;
    out.velocity = total <= 0.0 ? per[a].velocity
                                : Vec2((per[*b].distance / total) * per[a].velocity +
                                       (per[a].distance / total) * per[*b].velocity);
    out.bilinear = true;
  } else {
    out.velocity = per[a].velocity;
  }
  return out;
}

std::optional<Label> label_with_velocity(const SweepLine& line, double u, const Vec2& velocity,
                                         const Vec2& orientation) {
  const double i = line.l_i;
  const double g = line.margin_g;
  const double rl = line.l_rl;
  const double rr = line.l_rr;
  const double det = cross2(velocity, orientation);

  // Case boundaries are closed on the side of the earlier-listed case.
  if (line.left_avoidance) {
    if (u >= i && u <= i + g) return det >= 0.0 ? Label::Safe : Label::Danger;
    if (u >= 0.0 && u <= i) return det >= 0.0 ? Label::Safe : Label::Danger;
    if (u >= rr && u <= 0.0) return Label::Danger;
    if (u >= rr - g && u <= rr) return det > 0.0 ? Label::Danger : Label::Safe;
    return std::nullopt;
  }
  if (u <= i && u >= i - g) return det <= 0.0 ? Label::Safe : Label::Danger;
  if (u <= 0.0 && u >= i) return det <= 0.0 ? Label::Safe : Label::Danger;
  if (u <= rl && u >= 0.0) return Label::Danger;
  if (u <= rl + g && u >= rl) return det < 0.0 ? Label::Danger : Label::Safe;
  return std::nullopt;
}

std::optional<Label> label_point(const SweepLine& line, double u, const Vec2& orientation,
                                 const SolutionSet& solutions) {
  const Vec2 v = interpolate_velocity(solutions, line.point_at(u)).velocity;
  return label_with_velocity(line, u, v, orientation);
}

DetectionDataset generate_detection_dataset(const AnalyzedAccident& accident,
                                            const VehicleSpec& vehicle,
                                            const SweepParams& sweep,
                                            const ObservationParams& obs) {
  if (accident.solutions.trajectories.empty()) {
    throw std::invalid_argument("generate_detection_dataset: no solutions");
  }

  DetectionDataset dataset;
  const Trajectory& traj = accident.record.trajectory;
  for (std::size_t k = accident.notable.k_f; k <= accident.notable.k_a; ++k) {
    const auto line = build_sweep_line(accident.record, accident.solutions, k, sweep);
    if (!line) {
      ++dataset.lines_skipped;
      continue;
    }
    const double lo = std::min(line->l_rr, line->l_i) - sweep.margin_g;
    const double hi = std::max(line->l_rl, line->l_i) + sweep.margin_g;
    const double t = traj.time_at(k);
    const Vec2 forward = line->anchor.heading_dir();
    const double speed = vehicle.target_speed;

    const long steps = std::lround(std::floor((hi - lo) / sweep.u_step));
    for (long m = 0; m <= steps; ++m) {
      const double u = lo + m * sweep.u_step;
      const Vec2 field =
          interpolate_velocity(accident.solutions, line->point_at(u)).velocity;
      for (int o = 0; o < sweep.orientation_count; ++o) {
        const double frac = sweep.orientation_count > 1
                                ? static_cast<double>(o) / (sweep.orientation_count - 1)
                                : 0.5;
        const double delta = -sweep.orientation_spread + frac * 2.0 * sweep.orientation_spread;
        const Vec2 v_u = rotated(forward, delta);
        const auto label = label_with_velocity(*line, u, field, v_u);
        if (!label) continue;

        DetectionSample sample;
        sample.meta = {line->point_at(u), v_u, *label, k, u};
        State pose;
        pose.position = sample.meta.position;
        pose.velocity = speed * v_u;
        sample.window = snapshot_window(
            encode_observation(accident.record.scenario, vehicle, pose, t, obs), obs);
        dataset.samples.push_back(std::move(sample));
      }
    }
  }
  return dataset;
}

std::vector<RegressionSample> generate_avoidance_dataset(const AnalyzedAccident& accident,
                                                         const VehicleSpec& vehicle,
                                                         const ObservationParams& obs) {
  if (accident.solutions.trajectories.empty()) {
    throw std::invalid_argument("generate_avoidance_dataset: no solutions");
  }
  std::vector<RegressionSample> samples;
  for (const auto& [k, traj] : accident.solutions.trajectories) {
    ObservationWindow window;
    const std::size_t steps = traj.states.size() > 1 ? traj.states.size() - 1 : 1;
    for (std::size_t j = 0; j < steps; ++j) {
      window.push(encode_observation(accident.record.scenario, vehicle, traj.states[j],
                                     traj.time_at(j), obs));
      samples.push_back({window.flatten_normalized(obs), traj.steers[j]});
    }
  }
  return samples;
}

std::vector<RegressionSample> generate_following_dataset(const Scenario& scenario,
                                                         const VehicleSpec& vehicle,
                                                         const FollowingOptions& options,
                                                         const ObservationParams& obs) {
  std::vector<RegressionSample> samples;
  std::mt19937_64 rng(options.seed);

  if (scenario.road.kind == RoadKind::OpenGround) {
    const Vec2 target = scenario.target.value_or(Vec2{0.0, 0.0});
    std::uniform_real_distribution<double> span(0.1 * scenario.road.length,
                                                0.9 * scenario.road.length);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    while (samples.size() < static_cast<std::size_t>(options.open_ground_samples)) {
      State pose;
      pose.position = {span(rng), span(rng)};
      if ((target - pose.position).norm() < 2.0 * scenario.target_radius) continue;
      const double bearing = std::atan2(target.y() - pose.position.y(),
                                        target.x() - pose.position.x());
      // Headings biased around the target bearing, as driving poses would be.
      pose.velocity = vehicle.target_speed * unit_from_angle(bearing + 0.25 * angle(rng));
      const double steer = bearing_steer(target, pose, vehicle);
      samples.push_back(
          {snapshot_window(encode_observation(scenario, vehicle, pose, 0.0, obs), obs), steer});
    }
    return samples;
  }

  std::uniform_real_distribution<double> jitter(-options.lap_jitter, options.lap_jitter);
  const int horizon =
      static_cast<int>(scenario.road.total_length() / (vehicle.target_speed * kDefaultDt)) - 40;
  for (int lap = 0; lap < options.laps; ++lap) {
    Scenario lap_scenario = scenario;
    lap_scenario.obstacles.clear();  // lane-following data comes from empty roads
    const double lane = scenario.road.right_lane_center();
    lap_scenario.start_state.position = road_point(scenario.road, 5.0, lane + jitter(rng));
    lap_scenario.start_state.velocity =
        vehicle.target_speed * scenario.road.centerline_tangent(5.0);

    const auto controller = reference_controller(lap_scenario, vehicle);
    const RolloutResult r = rollout(lap_scenario, vehicle, controller, horizon);

    ObservationWindow window;
    const std::size_t steps = r.trajectory.states.size() > 1 ? r.trajectory.states.size() - 1 : 0;
    for (std::size_t j = 0; j < steps; ++j) {
      window.push(encode_observation(lap_scenario, vehicle, r.trajectory.states[j],
                                     r.trajectory.time_at(j), obs));
      samples.push_back({window.flatten_normalized(obs), r.trajectory.steers[j]});
    }
  }
  return samples;
}

double mean_pairwise_distance(const std::vector<Eigen::VectorXd>& rows, std::size_t cap,
                              unsigned long long seed) {
  if (rows.size() < 2) return 0.0;
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (rows.size() > cap) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(cap);
  }
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      total += (rows[idx[a]] - rows[idx[b]]).norm();
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace drivelab
