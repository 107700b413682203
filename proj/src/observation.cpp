#include "drivelab/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drivelab {

namespace {

// Ray-disc: smallest t >= 0 with |o + t d - c| = r.
double ray_disc(const Vec2& origin, const Vec2& dir, const Vec2& center, double radius) {
  const Vec2 rel = origin - center;
  const double b = 2.0 * rel.dot(dir);
  const double c = rel.squaredNorm() - radius * radius;
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double sq = std::sqrt(disc);
  const double t0 = (-b - sq) / 2.0;
  const double t1 = (-b + sq) / 2.0;
  if (t0 >= 0.0) return t0;
  if (t1 >= 0.0) return 0.0;  // origin inside the disc
  return std::numeric_limits<double>::infinity();
}

// Slab test in the box frame.
double ray_box(const Vec2& origin, const Vec2& dir, const OrientedBox& box) {
  const Vec2 o = rotated(origin - box.center, -box.heading);
  const Vec2 d = rotated(dir, -box.heading);
  double t_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 2; ++axis) {
    const double half = axis == 0 ? box.half.x() : box.half.y();
    const double od = axis == 0 ? o.x() : o.y();
    const double dd = axis == 0 ? d.x() : d.y();
    if (std::abs(dd) < 1e-12) {
      if (std::abs(od) > half) return std::numeric_limits<double>::infinity();
      continue;
    }
    double t0 = (-half - od) / dd;
    double t1 = (half - od) / dd;
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return std::numeric_limits<double>::infinity();
  }
  return t_min;
}

}  // namespace

double cast_ray(const Scenario& scenario, const Vec2& origin, const Vec2& dir, double t,
                double max_range) {
  double best = max_range;
  for (const Obstacle& ob : scenario.obstacles) {
    const Vec2 obp = ob.position_at(t);
    // A hit within range requires the center within range + bounding radius.
    const double reach = max_range + ob.bounding_radius();
    if ((obp - origin).squaredNorm() > reach * reach) continue;
    double hit;
    if (ob.shape == ObstacleShape::Disc) {
      hit = ray_disc(origin, dir, obp, ob.radius);
    } else {
      hit = ray_box(origin, dir, obstacle_box(ob, t));
    }
    best = std::min(best, hit);
  }
  return std::min(best, max_range);
}

Observation encode_observation(const Scenario& scenario, const VehicleSpec& vehicle,
                               const State& state, double t, const ObservationParams& params) {
  Observation obs;
  obs.speed = state.speed();

  const double heading = state.heading();
  const Vec2 sensor = vehicle_footprint(state, vehicle).center;
  obs.rays.resize(params.ray_count);
  for (int i = 0; i < params.ray_count; ++i) {
    const double frac = params.ray_count > 1
                            ? static_cast<double>(i) / (params.ray_count - 1)
                            : 0.5;
    const double angle = heading - 0.5 * params.fov + frac * params.fov;
    obs.rays[i] = cast_ray(scenario, sensor, unit_from_angle(angle), t, params.max_range);
  }

  if (scenario.road.kind == RoadKind::OpenGround) {
    obs.lateral_offset = 0.0;
    const Vec2 target = scenario.target.value_or(state.position + Vec2{1.0, 0.0});
    const double bearing = std::atan2(target.y() - state.position.y(),
                                      target.x() - state.position.x());
    obs.heading_error = wrap_angle(heading - bearing);
  } else {
    const RoadFrame frame = road_frame(scenario.road, state.position);
    obs.lateral_offset = frame.lateral;
    const Vec2 tangent = scenario.road.centerline_tangent(frame.arc_length);
    obs.heading_error = wrap_angle(heading - std::atan2(tangent.y(), tangent.x()));
  }
  return obs;
}

Eigen::VectorXd normalize_observation(const Observation& obs, const ObservationParams& params) {
  Eigen::VectorXd out(params.dim());
  out.head(params.ray_count) = obs.rays / params.max_range;
  out[params.ray_count] = obs.lateral_offset / params.lateral_scale;
  out[params.ray_count + 1] = obs.heading_error / params.heading_scale;
  out[params.ray_count + 2] = obs.speed / params.speed_scale;
  return out;
}

void ObservationWindow::push(const Observation& obs) {
  if (window_.empty()) {
    for (int i = 0; i < kLength; ++i) window_.push_back(obs);
    return;
  }
  window_.pop_front();
  window_.push_back(obs);
}

Eigen::VectorXd ObservationWindow::flatten_normalized(const ObservationParams& params) const {
  Eigen::VectorXd out(params.dim() * kLength);
  int offset = 0;
  for (const Observation& obs : window_) {
    out.segment(offset, params.dim()) = normalize_observation(obs, params);
    offset += params.dim();
  }
  return out;
}

Eigen::VectorXd snapshot_window(const Observation& obs, const ObservationParams& params) {
  ObservationWindow w;
  w.push(obs);
  return w.flatten_normalized(params);
}

}  // namespace drivelab
