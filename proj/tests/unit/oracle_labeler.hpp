#pragma once

// Brute-force reference labeler, written independently of the library path.
// Everything here recomputes from raw trajectories with plain loops; tests
// compare its verdicts against drivelab::label_point / interpolate_velocity.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "drivelab/datagen.hpp"

namespace oracle {

using drivelab::Label;
using drivelab::SolutionSet;
using drivelab::SweepLine;
using drivelab::Vec2;

struct TrajectoryDistance {
  std::size_t key = 0;
  double dist = std::numeric_limits<double>::infinity();
  Vec2 interpolated{0.0, 0.0};
  bool left_of = false;  // point lies left of the trajectory's local direction
};

inline TrajectoryDistance scan_trajectory(std::size_t key,
                                          const std::vector<drivelab::State>& states,
                                          const Vec2& point) {
  TrajectoryDistance result;
  result.key = key;

  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double d = (states[i].position - point).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  std::size_t second = best;
  double second_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i == best) continue;
    const double d = (states[i].position - point).norm();
    if (d < second_d) {
      second_d = d;
      second = i;
    }
  }

  result.dist = best_d;
  if (!std::isfinite(second_d) || best_d + second_d <= 0.0) {
    result.interpolated = states[best].velocity;
  } else {
    const double wa = second_d / (best_d + second_d);
    const double wb = best_d / (best_d + second_d);
    result.interpolated = wa * states[best].velocity + wb * states[second].velocity;
  }
  const Vec2 v = states[best].velocity;
  const Vec2 rel = point - states[best].position;
  result.left_of = v.x() * rel.y() - v.y() * rel.x() >= 0.0;
  return result;
}

inline Vec2 field_velocity(const SolutionSet& solutions, const Vec2& point) {
  std::vector<TrajectoryDistance> scans;
  for (const auto& [k, traj] : solutions.trajectories) {
    if (!traj.states.empty()) scans.push_back(scan_trajectory(k, traj.states, point));
  }
  if (scans.empty()) return {0.0, 0.0};

  const TrajectoryDistance* a = &scans.front();
  for (const auto& s : scans) {
    if (s.dist < a->dist) a = &s;
  }
  const TrajectoryDistance* b = nullptr;
  for (const auto& s : scans) {
    if (s.left_of == a->left_of) continue;
    if (b == nullptr || s.dist < b->dist) b = &s;
  }
  if (b == nullptr) return a->interpolated;
  const double total = a->dist + b->dist;
  if (total <= 0.0) return a->interpolated;
  return (b->dist / total) * a->interpolated + (a->dist / total) * b->interpolated;
}

inline double det2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Region cases checked one by one against the stated intervals, boundaries
// assigned to the earlier case.
inline std::optional<Label> label(const SweepLine& line, double u, const Vec2& v_u,
                                  const SolutionSet& solutions) {
  const double i = line.l_i;
  const double g = line.margin_g;

  if (i >= 0.0) {
    const bool case_a = u >= i && u <= i + g;
    const bool case_b = !case_a && u >= 0.0 && u <= i;
    const bool case_c = !case_a && !case_b && u >= line.l_rr && u <= 0.0;
    const bool case_d = !case_a && !case_b && !case_c && u >= line.l_rr - g && u <= line.l_rr;
    if (case_c) return Label::Danger;
    if (case_a || case_b) {
      return det2(field_velocity(solutions, line.point_at(u)), v_u) >= 0.0 ? Label::Safe
                                                                           : Label::Danger;
    }
    if (case_d) {
      return det2(field_velocity(solutions, line.point_at(u)), v_u) > 0.0 ? Label::Danger
                                                                          : Label::Safe;
    }
    return std::nullopt;
  }

  const bool case_a = u <= i && u >= i - g;
  const bool case_b = !case_a && u <= 0.0 && u >= i;
  const bool case_c = !case_a && !case_b && u <= line.l_rl && u >= 0.0;
  const bool case_d = !case_a && !case_b && !case_c && u <= line.l_rl + g && u >= line.l_rl;
  if (case_c) return Label::Danger;
  if (case_a || case_b) {
    return det2(field_velocity(solutions, line.point_at(u)), v_u) <= 0.0 ? Label::Safe
                                                                         : Label::Danger;
  }
  if (case_d) {
    return det2(field_velocity(solutions, line.point_at(u)), v_u) < 0.0 ? Label::Danger
                                                                        : Label::Safe;
  }
  return std::nullopt;
}

}  // namespace oracle
