#include "drivelab/accident.hpp"

#include <algorithm>

#include "drivelab/parallel.hpp"

namespace drivelab {

AccidentRecord make_accident_record(const RolloutResult& result, const Scenario& scenario,
                                    std::size_t max_frames) {
  AccidentRecord record;
  record.scenario = scenario;

  const Trajectory& full = result.trajectory;
  const std::size_t end = std::min(result.outcome.frame + 1, full.states.size());
  const std::size_t begin = end > max_frames ? end - max_frames : 0;

  record.trajectory.dt = full.dt;
  record.trajectory.frame_index_origin = full.frame_index_origin + static_cast<long>(begin);
  record.trajectory.states.assign(full.states.begin() + begin, full.states.begin() + end);
  record.trajectory.steers.assign(full.steers.begin() + begin, full.steers.begin() + end);
  return record;
}

std::size_t find_k_a(const CollisionField& field, const AccidentRecord& record) {
  const Trajectory& traj = record.trajectory;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (field.probability(traj.states[k], PredictionPoint{}, traj.time_at(k)) >
        field.params().collision_eps) {
      return k;
    }
  }
  throw NoCollisionError();
}

bool solves(const CollisionField& field, const Trajectory& traj) {
  if (!coll(field, traj).empty()) return false;
  const Scenario& scenario = field.scenario();
  if (scenario.road.kind == RoadKind::OpenGround) return true;
  const double limit = scenario.road.border_offset() + field.params().solution_road_margin;
  for (const State& s : traj.states) {
    if (std::abs(signed_lateral_offset(scenario.road, s.position)) > limit) return false;
  }
  return true;
}

namespace {

bool clean_rollout_from(const CollisionField& field, const AccidentRecord& record,
                        std::size_t k) {
  const Trajectory& traj = record.trajectory;
  const Trajectory attempt =
      expert_rollout(field, traj.states[k], traj.frame_index_origin + static_cast<long>(k));
  return solves(field, attempt);
}

}  // namespace

std::size_t find_k_l(const CollisionField& field, const AccidentRecord& record, std::size_t k_a,
                     int jobs) {
  // Scan downward from k_a in parallel batches; the answer is the max clean k.
  const int batch = std::max(1, jobs);
  std::size_t k = k_a + 1;
  while (k > 0) {
    const std::size_t count = std::min<std::size_t>(batch, k);
    std::vector<std::size_t> candidates(count);
    for (std::size_t i = 0; i < count; ++i) candidates[i] = k - 1 - i;
    const auto clean = parallel_map(count, jobs, [&](std::size_t i) {
      return clean_rollout_from(field, record, candidates[i]);
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (clean[i]) return candidates[i];
    }
    k -= count;
  }
  throw UnavoidableError();
}

std::pair<std::size_t, bool> find_k_f(const CollisionField& field, const AccidentRecord& record,
                                      std::size_t k_l) {
  const Trajectory& traj = record.trajectory;
  const double eps = field.params().collision_eps;

  bool found = false;
  std::size_t last_quiet = 0;
  for (std::size_t k = 0; k <= k_l; ++k) {
    if (field.trajectory_probability(traj.states[k], traj.time_at(k)) <= eps) {
      last_quiet = k;
      found = true;
    }
  }
  if (!found) return {0, false};          // endangered from the first frame
  if (last_quiet == k_l) return {k_l, true};  // interaction only appears after k_l
  return {last_quiet + 1, false};
}

SolutionSet solve_accident(const CollisionField& field, const AccidentRecord& record,
                           const NotableStates& notable, int jobs) {
  if (notable.k_f > notable.k_l) throw std::invalid_argument("solve_accident: k_f > k_l");
  const Trajectory& traj = record.trajectory;

  const std::size_t count = notable.k_l - notable.k_f + 1;
  auto attempts = parallel_map(count, jobs, [&](std::size_t i) {
    const std::size_t k = notable.k_f + i;
    return expert_rollout(field, traj.states[k], traj.frame_index_origin + static_cast<long>(k));
  });

  SolutionSet solutions;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = notable.k_f + i;
    if (solves(field, attempts[i])) {
      solutions.trajectories.emplace(k, std::move(attempts[i]));
    } else {
      solutions.excluded.push_back(k);
    }
  }
  if (solutions.trajectories.empty()) throw UnavoidableError();
  return solutions;
}

AnalyzedAccident analyze_accident(const CollisionField& field, const AccidentRecord& record,
                                  int jobs) {
  AnalyzedAccident analyzed;
  analyzed.record = record;
  analyzed.notable.k_a = find_k_a(field, record);
  analyzed.notable.k_l = find_k_l(field, record, analyzed.notable.k_a, jobs);
  const auto [k_f, degenerate] = find_k_f(field, record, analyzed.notable.k_l);
  analyzed.notable.k_f = k_f;
  analyzed.notable.degenerate_window = degenerate;
  analyzed.solutions = solve_accident(field, record, analyzed.notable, jobs);
  return analyzed;
}

}  // namespace drivelab
