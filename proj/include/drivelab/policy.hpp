#pragma once

#include <optional>
#include <string>

#include "drivelab/datagen.hpp"
#include "drivelab/mlp.hpp"
#include "drivelab/observation.hpp"

namespace drivelab {

// Hierarchical control policy: a Detection classifier gates between the
// Following and Avoidance steering regressors over a 5-step window.
// Regressors are trained on steer / max_steer; outputs are clamped.
struct PolicyModel {
  ObservationParams obs;
  double max_steer = 25.0 * M_PI / 180.0;
  std::optional<Mlp> detection;
  std::optional<Mlp> following;
  std::optional<Mlp> avoidance;

  bool hierarchical() const { return detection.has_value() && avoidance.has_value(); }
};

struct GateDecision {
  double steer = 0.0;
  bool used_avoidance = false;
  double detection_score = 0.0;  // sigmoid output, 0 when no detection head
};

GateDecision act(const PolicyModel& model, const Eigen::VectorXd& window);

inline double act_steer(const PolicyModel& model, const Eigen::VectorXd& window) {
  return act(model, window).steer;
}

struct RegressorTraining {
  Mlp model;
  double validation_loss = 0.0;
  int epochs = 0;
};

struct ClassifierTraining {
  Mlp model;
  double validation_loss = 0.0;
  double validation_accuracy = 0.0;
  int epochs = 0;
};

// Steer labels are normalized by max_steer before the MSE fit.
RegressorTraining train_regressor(const std::vector<RegressionSample>& samples,
                                  const TrainConfig& config, double max_steer);

// Requires both classes; DANGER maps to 1.
ClassifierTraining train_classifier(const std::vector<DetectionSample>& samples,
                                    const TrainConfig& config);

// Stateful rollout controller: feeds each visited state into the window and
// queries the gate. Optionally records the per-frame gate decisions.
SteerFn policy_controller(const PolicyModel& model, const Scenario& scenario,
                          const VehicleSpec& vehicle,
                          std::vector<GateDecision>* gate_log = nullptr);

void save_policy(const PolicyModel& model, const std::string& path);
PolicyModel load_policy(const std::string& path);

}  // namespace drivelab
