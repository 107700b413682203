#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "drivelab/expert.hpp"

namespace drivelab {

struct NoCollisionError : std::runtime_error {
  NoCollisionError() : std::runtime_error("trajectory contains no colliding frame") {}
};

struct UnavoidableError : std::runtime_error {
  UnavoidableError() : std::runtime_error("no frame admits a collision-free expert rollout") {}
};

// Recorded tail of an episode that ended in a collision, together with the
// scenario it happened in. Frame indices below are positions in `trajectory`.
struct AccidentRecord {
  Trajectory trajectory;
  Scenario scenario;
};

struct NotableStates {
  std::size_t k_a = 0;  // earliest colliding frame
  std::size_t k_l = 0;  // last frame the expert can still avoid from
  std::size_t k_f = 0;  // first frame the interaction is perceived
  bool degenerate_window = false;
};

struct SolutionSet {
  std::map<std::size_t, Trajectory> trajectories;  // k -> collision-free rollout from s_k
  std::vector<std::size_t> excluded;               // non-monotone starts, logged
};

struct AnalyzedAccident {
  AccidentRecord record;
  NotableStates notable;
  SolutionSet solutions;
};

// Keeps the trailing `max_frames` of a collision rollout, through the
// colliding frame, preserving absolute frame indexing.
AccidentRecord make_accident_record(const RolloutResult& result, const Scenario& scenario,
                                    std::size_t max_frames = 200);

// A rollout solves the accident when no frame trips the collision threshold
// and, on road scenarios, it stays within the borders plus the solution
// margin.
bool solves(const CollisionField& field, const Trajectory& traj);

std::size_t find_k_a(const CollisionField& field, const AccidentRecord& record);
std::size_t find_k_l(const CollisionField& field, const AccidentRecord& record, std::size_t k_a,
                     int jobs = 1);
std::pair<std::size_t, bool> find_k_f(const CollisionField& field, const AccidentRecord& record,
                                      std::size_t k_l);

SolutionSet solve_accident(const CollisionField& field, const AccidentRecord& record,
                           const NotableStates& notable, int jobs = 1);

AnalyzedAccident analyze_accident(const CollisionField& field, const AccidentRecord& record,
                                  int jobs = 1);

}  // namespace drivelab
