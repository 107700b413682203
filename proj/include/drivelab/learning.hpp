#pragma once

#include <string>
#include <vector>

#include "drivelab/accident.hpp"
#include "drivelab/datagen.hpp"
#include "drivelab/policy.hpp"

namespace drivelab {

enum class Regime { Supervised, Dagger, Adaps };

const char* to_string(Regime regime);

// One experiment family: where the lane-following data comes from, the
// accident task to master, and the training/analysis knobs.
struct TaskConfig {
  VehicleSpec vehicle;
  ExpertParams expert;
  ObservationParams obs;
  SweepParams sweep;
  TrainConfig classifier_train;
  TrainConfig regressor_train;
  FollowingOptions following;
  std::vector<ScenarioSpec> following_scenarios;
  ScenarioSpec task_scenario;
  int eval_horizon = 900;
  int max_iterations = 4;
  int dagger_iterations = 3;
  double dagger_alpha = 0.5;
  int dagger_horizon = 500;
  std::size_t record_frames = 200;
  unsigned long long seed = 7;
  int jobs = 2;
};

struct IterationStats {
  std::size_t index = 0;
  std::size_t new_samples = 0;  // labeled samples added this iteration
  double policy_loss = 0.0;     // l_i(pi_i) on the new data, clipped to [0, 1]
  std::size_t solve_count = 0;  // K = |solve(S)| (ADAPS)
  std::string outcome;
};

struct LearningRun {
  Regime regime = Regime::Supervised;
  unsigned long long seed = 0;
  PolicyModel policy;
  std::vector<IterationStats> iterations;
  double epsilon_min = 0.0;
  double epsilon_regret = 0.0;
  bool task_solved = false;
  double detection_validation_accuracy = 0.0;
  // Normalized current observations of the first iteration's new samples.
  std::vector<Eigen::VectorXd> first_iteration_observations;
};

LearningRun run_supervised(const TaskConfig& task);
LearningRun run_dagger(const TaskConfig& task);
LearningRun run_adaps(const TaskConfig& task);

// The no-gate ablation: one regressor trained on the pooled following +
// avoidance data of an ADAPS run.
PolicyModel train_flat_policy(const TaskConfig& task,
                              const std::vector<RegressionSample>& pooled);

// Pooled datasets of a finished run, kept for ablations and persistence.
struct RunDatasets {
  std::vector<RegressionSample> following;
  std::vector<DetectionSample> detection;
  std::vector<RegressionSample> avoidance;
};

// As run_adaps, but also returns the aggregated pools.
LearningRun run_adaps_with_datasets(const TaskConfig& task, RunDatasets* datasets);

struct EvalResult {
  int successes = 0;
  int trials = 0;
  std::vector<std::string> outcomes;

  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

// Lap completion on the empty road with seeded start jitter.
EvalResult evaluate_laps(const PolicyModel& policy, const ScenarioSpec& road,
                         const VehicleSpec& vehicle, int laps, unsigned long long seed,
                         int jobs = 1);

// The 50-position protocol: obstacle lateral offsets uniformly spanning a 3 m
// in-lane segment; success = avoid, stay on the road, and resume the lane.
EvalResult evaluate_obstacle_suite(const PolicyModel& policy, const TaskConfig& task,
                                   int positions = 50);

// Scripted-adversary trials with seeded phase jitter; success = target reached.
EvalResult evaluate_open_ground(const PolicyModel& policy, const TaskConfig& task,
                                int trials = 50, unsigned long long seed = 0);

struct ComparisonReport {
  std::size_t adaps_iter1_samples = 0;
  std::size_t dagger_iter1_samples = 0;
  double volume_ratio = 0.0;
  double adaps_heterogeneity = 0.0;
  double dagger_heterogeneity = 0.0;
  double heterogeneity_ratio = 0.0;
  int adaps_iterations = 0;
  int dagger_iterations = 0;
  bool adaps_solved = false;
  double adaps_success_rate = 0.0;
  double dagger_success_rate = 0.0;
};

ComparisonReport compare_regimes(const LearningRun& adaps, const LearningRun& dagger,
                                 const TaskConfig& task);

// Mean clipped surrogate loss of a policy on regression samples, in [0, 1].
double surrogate_loss(const PolicyModel& policy, const std::vector<RegressionSample>& samples);

}  // namespace drivelab
