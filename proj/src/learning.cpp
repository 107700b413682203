#include "drivelab/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "drivelab/controllers.hpp"
#include "drivelab/parallel.hpp"

namespace drivelab {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Supervised: return "supervised";
    case Regime::Dagger: return "dagger";
    case Regime::Adaps: return "adaps";
  }
  return "unknown";
}

namespace {

unsigned long long derive_seed(unsigned long long base, unsigned long long stream) {
  std::seed_seq seq{base, stream};
  unsigned long long out[1];
  seq.generate(out, out + 1);
  return out[0];
}

std::vector<RegressionSample> gather_following_data(const TaskConfig& task) {
  std::vector<RegressionSample> samples;
  for (std::size_t i = 0; i < task.following_scenarios.size(); ++i) {
    FollowingOptions options = task.following;
    options.seed = derive_seed(task.seed, 100 + i);
    const Scenario scenario = build_scenario(task.following_scenarios[i]);
    auto part = generate_following_dataset(scenario, task.vehicle, options, task.obs);
    samples.insert(samples.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  return samples;
}

// Normalized current-observation slice (the newest window entry).
Eigen::VectorXd current_observation(const Eigen::VectorXd& window, int dim) {
  return window.segment(window.size() - dim, dim);
}

void collect_observations(const std::vector<RegressionSample>& samples, int dim,
                          std::vector<Eigen::VectorXd>& rows) {
  for (const auto& s : samples) rows.push_back(current_observation(s.window, dim));
}

void collect_observations(const std::vector<DetectionSample>& samples, int dim,
                          std::vector<Eigen::VectorXd>& rows) {
  for (const auto& s : samples) rows.push_back(current_observation(s.window, dim));
}

TrainConfig seeded(TrainConfig config, unsigned long long seed) {
  config.seed = seed;
  return config;
}

}  // namespace

double surrogate_loss(const PolicyModel& policy, const std::vector<RegressionSample>& samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    const double predicted = act_steer(policy, s.window) / policy.max_steer;
    const double label = s.steer / policy.max_steer;
    const double err = predicted - label;
    total += std::min(1.0, err * err);
  }
  return total / static_cast<double>(samples.size());
}

LearningRun run_supervised(const TaskConfig& task) {
  LearningRun run;
  run.regime = Regime::Supervised;
  run.seed = task.seed;
  run.policy.obs = task.obs;
  run.policy.max_steer = task.vehicle.max_steer;

  const auto following = gather_following_data(task);
  const RegressorTraining trained =
      train_regressor(following, seeded(task.regressor_train, derive_seed(task.seed, 1)),
                      task.vehicle.max_steer);
  run.policy.following = trained.model;

  IterationStats stats;
  stats.index = 1;
  stats.new_samples = following.size();
  stats.policy_loss = std::min(1.0, trained.validation_loss);
  const Scenario scenario = build_scenario(task.task_scenario);
  const RolloutResult r = rollout(scenario, task.vehicle,
                                  policy_controller(run.policy, scenario, task.vehicle),
                                  task.eval_horizon);
  stats.outcome = to_string(r.outcome.kind);
  run.task_solved = r.outcome.kind == OutcomeKind::Clean ||
                    r.outcome.kind == OutcomeKind::TargetReached;
  run.iterations.push_back(stats);
  collect_observations(following, task.obs.dim(), run.first_iteration_observations);
  return run;
}

LearningRun run_dagger(const TaskConfig& task) {
  LearningRun run;
  run.regime = Regime::Dagger;
  run.seed = task.seed;
  run.policy.obs = task.obs;
  run.policy.max_steer = task.vehicle.max_steer;

  const Scenario scenario = build_scenario(task.task_scenario);
  const CollisionField field(scenario, task.vehicle, task.expert);

  // The learner is a single steering regressor, initialized untrained.
  run.policy.following =
      make_mlp(task.obs.dim() * ObservationWindow::kLength, task.regressor_train.hidden,
               derive_seed(task.seed, 2));

  std::vector<RegressionSample> aggregate;
  std::vector<std::vector<RegressionSample>> per_iteration;
  std::vector<PolicyModel> policies;  // pi_i, i = 1..N
  std::vector<double> losses;         // l_i(pi_i)

  std::mt19937_64 mix_rng(derive_seed(task.seed, 3));
  for (int i = 1; i <= task.dagger_iterations; ++i) {
    const double beta = std::pow(1.0 - task.dagger_alpha, i - 1);
    policies.push_back(run.policy);

    // Collect one episode under the beta-mixture, labeling every state with
    // the expert action.
    std::vector<RegressionSample> collected;
    ObservationWindow window;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const SteerFn mixture = [&](const State& s, std::size_t frame) {
      const double t = frame * kDefaultDt;
      window.push(encode_observation(scenario, task.vehicle, s, t, task.obs));
      const Eigen::VectorXd flat = window.flatten_normalized(task.obs);
      const double expert = expert_steer(field, s, t);
      collected.push_back({flat, expert});
      const double learner = act_steer(run.policy, flat);
      return coin(mix_rng) < beta ? expert : learner;
    };
    const RolloutResult episode = rollout(scenario, task.vehicle, mixture, task.dagger_horizon);

    IterationStats stats;
    stats.index = static_cast<std::size_t>(i);
    stats.new_samples = collected.size();
    stats.policy_loss = surrogate_loss(run.policy, collected);
    stats.outcome = to_string(episode.outcome.kind);
    losses.push_back(stats.policy_loss);
    run.iterations.push_back(stats);

    if (i == 1) collect_observations(collected, task.obs.dim(), run.first_iteration_observations);
    per_iteration.push_back(collected);
    aggregate.insert(aggregate.end(), collected.begin(), collected.end());

    // Follow-the-Leader: retrain from scratch on everything seen so far.
    const RegressorTraining trained = train_regressor(
        aggregate, seeded(task.regressor_train, derive_seed(task.seed, 200 + i)),
        task.vehicle.max_steer);
    run.policy.following = trained.model;
  }

  // Empirical hindsight loss: the best candidate policy on the per-iteration
  // datasets (Follow-the-Leader's final answer is the natural minimizer).
  policies.push_back(run.policy);
  double best = std::numeric_limits<double>::infinity();
  for (const PolicyModel& candidate : policies) {
    double avg = 0.0;
    for (const auto& data : per_iteration) avg += surrogate_loss(candidate, data);
    best = std::min(best, avg / static_cast<double>(per_iteration.size()));
  }
  run.epsilon_min = best;
  const double mean_loss =
      std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
  run.epsilon_regret = mean_loss - run.epsilon_min;

  const RolloutResult final_run = rollout(scenario, task.vehicle,
                                          policy_controller(run.policy, scenario, task.vehicle),
                                          task.eval_horizon);
  run.task_solved = final_run.outcome.kind == OutcomeKind::Clean ||
                    final_run.outcome.kind == OutcomeKind::TargetReached;
  return run;
}

LearningRun run_adaps_with_datasets(const TaskConfig& task, RunDatasets* datasets) {
  LearningRun run;
  run.regime = Regime::Adaps;
  run.seed = task.seed;
  run.policy.obs = task.obs;
  run.policy.max_steer = task.vehicle.max_steer;

  RunDatasets local;
  RunDatasets& pools = datasets != nullptr ? *datasets : local;
  if (pools.following.empty()) pools.following = gather_following_data(task);

  const RegressorTraining follow_trained = train_regressor(
      pools.following, seeded(task.regressor_train, derive_seed(task.seed, 1)),
      task.vehicle.max_steer);
  run.policy.following = follow_trained.model;
  if (!pools.detection.empty()) {
    // Warm pools (e.g. carried over from the straight-road run) participate
    // from the start.
    run.policy.detection =
        train_classifier(pools.detection,
                         seeded(task.classifier_train, derive_seed(task.seed, 4)))
            .model;
    run.policy.avoidance = train_regressor(pools.avoidance,
                                           seeded(task.regressor_train, derive_seed(task.seed, 5)),
                                           task.vehicle.max_steer)
                               .model;
  }

  const Scenario scenario = build_scenario(task.task_scenario);
  const CollisionField field(scenario, task.vehicle, task.expert);

  std::vector<std::vector<RegressionSample>> per_iteration;
  std::vector<double> losses;
  for (int i = 1; i <= task.max_iterations; ++i) {
    const RolloutResult episode = rollout(scenario, task.vehicle,
                                          policy_controller(run.policy, scenario, task.vehicle),
                                          task.eval_horizon);
    if (episode.outcome.kind != OutcomeKind::Collision) {
      run.task_solved = episode.outcome.kind == OutcomeKind::Clean ||
                        episode.outcome.kind == OutcomeKind::TargetReached;
      break;
    }

    IterationStats stats;
    stats.index = static_cast<std::size_t>(i);
    stats.outcome = to_string(episode.outcome.kind);

    const AccidentRecord record =
        make_accident_record(episode, scenario, task.record_frames);
    AnalyzedAccident analyzed;
    try {
      analyzed = analyze_accident(field, record, task.jobs);
    } catch (const UnavoidableError&) {
      stats.outcome = "Unavoidable";
      run.iterations.push_back(stats);
      break;  // the same accident would recur deterministically
    }
    stats.solve_count = analyzed.solutions.trajectories.size();

    DetectionDataset detection =
        generate_detection_dataset(analyzed, task.vehicle, task.sweep, task.obs);
    std::vector<RegressionSample> avoidance =
        generate_avoidance_dataset(analyzed, task.vehicle, task.obs);
    stats.new_samples = detection.samples.size() + avoidance.size();
    stats.policy_loss = surrogate_loss(run.policy, avoidance);
    losses.push_back(stats.policy_loss);

    if (i == 1) {
      collect_observations(detection.samples, task.obs.dim(),
                           run.first_iteration_observations);
      collect_observations(avoidance, task.obs.dim(), run.first_iteration_observations);
    }
    per_iteration.push_back(avoidance);

    pools.detection.insert(pools.detection.end(),
                           std::make_move_iterator(detection.samples.begin()),
                           std::make_move_iterator(detection.samples.end()));
    pools.avoidance.insert(pools.avoidance.end(), std::make_move_iterator(avoidance.begin()),
                           std::make_move_iterator(avoidance.end()));

    const ClassifierTraining cls = train_classifier(
        pools.detection, seeded(task.classifier_train, derive_seed(task.seed, 300 + i)));
    run.policy.detection = cls.model;
    run.detection_validation_accuracy = cls.validation_accuracy;
    run.policy.avoidance = train_regressor(pools.avoidance,
                                           seeded(task.regressor_train,
                                                  derive_seed(task.seed, 400 + i)),
                                           task.vehicle.max_steer)
                               .model;
    run.iterations.push_back(stats);
  }

  if (run.iterations.empty()) {
    // Never collided: following alone solves the task.
    IterationStats stats;
    stats.index = 0;
    stats.outcome = "Clean";
    run.iterations.push_back(stats);
  }

  if (!losses.empty()) {
    double best = 0.0;
    for (const auto& data : per_iteration) best += surrogate_loss(run.policy, data);
    run.epsilon_min = best / static_cast<double>(per_iteration.size());
    const double mean_loss =
        std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
    run.epsilon_regret = mean_loss - run.epsilon_min;
  }

  if (!run.task_solved) {
    const RolloutResult final_run = rollout(scenario, task.vehicle,
                                            policy_controller(run.policy, scenario, task.vehicle),
                                            task.eval_horizon);
    run.task_solved = final_run.outcome.kind == OutcomeKind::Clean ||
                      final_run.outcome.kind == OutcomeKind::TargetReached;
  }
  return run;
}

LearningRun run_adaps(const TaskConfig& task) { return run_adaps_with_datasets(task, nullptr); }

PolicyModel train_flat_policy(const TaskConfig& task,
                              const std::vector<RegressionSample>& pooled) {
  PolicyModel policy;
  policy.obs = task.obs;
  policy.max_steer = task.vehicle.max_steer;
  policy.following = train_regressor(pooled,
                                     seeded(task.regressor_train, derive_seed(task.seed, 6)),
                                     task.vehicle.max_steer)
                         .model;
  return policy;
}

namespace {

bool lap_success(const Scenario& scenario, const RolloutResult& r) {
  if (r.outcome.kind != OutcomeKind::Clean) return false;
  const double lane = scenario.road.right_lane_center();
  const State& last = r.trajectory.states.back();
  return std::abs(signed_lateral_offset(scenario.road, last.position) - lane) <= 1.0;
}

}  // namespace

EvalResult evaluate_laps(const PolicyModel& policy, const ScenarioSpec& road,
                         const VehicleSpec& vehicle, int laps, unsigned long long seed,
                         int jobs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<double> offsets(laps);
  for (int i = 0; i < laps; ++i) offsets[i] = jitter(rng);

  const auto results = parallel_map(static_cast<std::size_t>(laps), jobs, [&](std::size_t i) {
    ScenarioSpec spec = road;
    spec.start_lateral = offsets[i];
    const Scenario scenario = build_scenario(spec);
    const int horizon =
        static_cast<int>(scenario.road.total_length() / (vehicle.target_speed * kDefaultDt)) - 40;
    const RolloutResult r = rollout(scenario, vehicle,
                                    policy_controller(policy, scenario, vehicle), horizon);
    return std::make_pair(lap_success(scenario, r), std::string(to_string(r.outcome.kind)));
  });

  EvalResult eval;
  eval.trials = laps;
  for (const auto& [ok, outcome] : results) {
    eval.successes += ok ? 1 : 0;
    eval.outcomes.push_back(outcome);
  }
  return eval;
}

EvalResult evaluate_obstacle_suite(const PolicyModel& policy, const TaskConfig& task,
                                   int positions) {
  const auto results =
      parallel_map(static_cast<std::size_t>(positions), task.jobs, [&](std::size_t j) {
        ScenarioSpec spec = task.task_scenario;
        const double u =
            positions > 1 ? -1.5 + 3.0 * static_cast<double>(j) / (positions - 1) : 0.0;
        spec.obstacles.at(0).lateral += u;
        const Scenario scenario = build_scenario(spec);
        const RolloutResult r = rollout(scenario, task.vehicle,
                                        policy_controller(policy, scenario, task.vehicle),
                                        task.eval_horizon);
        bool ok = r.outcome.kind == OutcomeKind::Clean;
        if (ok) {
          const State& last = r.trajectory.states.back();
          const RoadFrame frame = road_frame(scenario.road, last.position);
          const double lane = scenario.road.right_lane_center();
          const Vec2 tangent = scenario.road.centerline_tangent(frame.arc_length);
          const double heading_err =
              wrap_angle(last.heading() - std::atan2(tangent.y(), tangent.x()));
          ok = frame.arc_length > spec.obstacles.at(0).arc_length + 20.0 &&
               std::abs(frame.lateral - lane) <= 1.0 &&
               std::abs(heading_err) <= 10.0 * M_PI / 180.0;
        }
        return std::make_pair(ok, std::string(to_string(r.outcome.kind)));
      });

  EvalResult eval;
  eval.trials = positions;
  for (const auto& [ok, outcome] : results) {
    eval.successes += ok ? 1 : 0;
    eval.outcomes.push_back(outcome);
  }
  return eval;
}

EvalResult evaluate_open_ground(const PolicyModel& policy, const TaskConfig& task, int trials,
                                unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> along(-20.0, 20.0);
  std::uniform_real_distribution<double> across(-1.0, 1.0);
  std::vector<Vec2> shifts(trials);
  for (int i = 0; i < trials; ++i) shifts[i] = {along(rng), across(rng)};

  const auto results =
      parallel_map(static_cast<std::size_t>(trials), task.jobs, [&](std::size_t i) {
        ScenarioSpec spec = task.task_scenario;
        auto& adversary = spec.obstacles.at(0);
        const Vec2 dir = adversary.velocity.normalized();
        adversary.position += shifts[i].x() * dir + shifts[i].y() * rotate90_left(dir);
        const Scenario scenario = build_scenario(spec);
        const RolloutResult r = rollout(scenario, task.vehicle,
                                        policy_controller(policy, scenario, task.vehicle),
                                        task.eval_horizon);
        return std::make_pair(r.outcome.kind == OutcomeKind::TargetReached,
                              std::string(to_string(r.outcome.kind)));
      });

  EvalResult eval;
  eval.trials = trials;
  for (const auto& [ok, outcome] : results) {
    eval.successes += ok ? 1 : 0;
    eval.outcomes.push_back(outcome);
  }
  return eval;
}

ComparisonReport compare_regimes(const LearningRun& adaps, const LearningRun& dagger,
                                 const TaskConfig& task) {
  (void)task;
  ComparisonReport report;
  report.adaps_iter1_samples =
      adaps.iterations.empty() ? 0 : adaps.iterations.front().new_samples;
  report.dagger_iter1_samples =
      dagger.iterations.empty() ? 0 : dagger.iterations.front().new_samples;
  report.volume_ratio = report.dagger_iter1_samples == 0
                            ? 0.0
                            : static_cast<double>(report.adaps_iter1_samples) /
                                  static_cast<double>(report.dagger_iter1_samples);

  const std::size_t matched =
      std::min<std::size_t>({adaps.first_iteration_observations.size(),
                             dagger.first_iteration_observations.size(), 1500});
  report.adaps_heterogeneity =
      mean_pairwise_distance(adaps.first_iteration_observations, matched, 0);
  report.dagger_heterogeneity =
      mean_pairwise_distance(dagger.first_iteration_observations, matched, 0);
  report.heterogeneity_ratio = report.dagger_heterogeneity == 0.0
                                   ? 0.0
                                   : report.adaps_heterogeneity / report.dagger_heterogeneity;

  report.adaps_iterations = static_cast<int>(adaps.iterations.size());
  report.dagger_iterations = static_cast<int>(dagger.iterations.size());
  report.adaps_solved = adaps.task_solved;
  return report;
}

}  // namespace drivelab
