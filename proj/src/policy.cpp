#include "drivelab/policy.hpp"

#include <cstdint>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace drivelab {

GateDecision act(const PolicyModel& model, const Eigen::VectorXd& window) {
  GateDecision decision;
  if (model.detection) decision.detection_score = sigmoid(model.detection->forward(window));
  decision.used_avoidance =
      model.hierarchical() && model.following ? decision.detection_score >= 0.5
                                              : (model.avoidance && !model.following);

  const Mlp* head = nullptr;
  if (decision.used_avoidance) {
    head = &*model.avoidance;
  } else if (model.following) {
    head = &*model.following;
  } else if (model.avoidance) {
    head = &*model.avoidance;
    decision.used_avoidance = true;
  }
  if (head == nullptr) return decision;  // untrained policy steers straight

  const double normalized = std::clamp(head->forward(window), -1.0, 1.0);
  decision.steer = normalized * model.max_steer;
  return decision;
}

RegressorTraining train_regressor(const std::vector<RegressionSample>& samples,
                                  const TrainConfig& config, double max_steer) {
  if (samples.empty()) throw std::invalid_argument("train_regressor: empty dataset");
  const Eigen::Index dim = samples.front().window.size();
  Eigen::MatrixXd X(dim, static_cast<Eigen::Index>(samples.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    X.col(static_cast<Eigen::Index>(i)) = samples[i].window;
    y[static_cast<Eigen::Index>(i)] = samples[i].steer / max_steer;
  }
  const TrainResult r = train_mlp(X, y, LossKind::SquaredError, config);
  return {r.model, r.best_validation_loss, r.epochs_run};
}

ClassifierTraining train_classifier(const std::vector<DetectionSample>& samples,
                                    const TrainConfig& config) {
  if (samples.empty()) throw std::invalid_argument("train_classifier: empty dataset");
  bool any_danger = false, any_safe = false;
  for (const auto& s : samples) {
    (s.meta.label == Label::Danger ? any_danger : any_safe) = true;
  }
  if (!any_danger || !any_safe) {
    throw std::invalid_argument("train_classifier: both classes must be present");
  }

  const Eigen::Index dim = samples.front().window.size();
  Eigen::MatrixXd X(dim, static_cast<Eigen::Index>(samples.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    X.col(static_cast<Eigen::Index>(i)) = samples[i].window;
    y[static_cast<Eigen::Index>(i)] = samples[i].meta.label == Label::Danger ? 1.0 : 0.0;
  }
  const TrainResult r = train_mlp(X, y, LossKind::LogisticCrossEntropy, config);
  return {r.model, r.best_validation_loss, r.validation_accuracy, r.epochs_run};
}

SteerFn policy_controller(const PolicyModel& model, const Scenario& scenario,
                          const VehicleSpec& vehicle, std::vector<GateDecision>* gate_log) {
  auto window = std::make_shared<ObservationWindow>();
  return [&model, scenario, vehicle, window, gate_log](const State& s, std::size_t frame) {
    window->push(encode_observation(scenario, vehicle, s, frame * kDefaultDt, model.obs));
    const GateDecision decision = act(model, window->flatten_normalized(model.obs));
    if (gate_log != nullptr) gate_log->push_back(decision);
    return decision.steer;
  };
}

namespace {

constexpr std::uint32_t kModelMagic = 0x444C4D31;  // "DLM1"

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_head(std::ostream& out, const std::optional<Mlp>& head) {
  write_u32(out, head ? 1 : 0);
  if (!head) return;
  write_u32(out, static_cast<std::uint32_t>(head->hidden_dim()));
  write_u32(out, static_cast<std::uint32_t>(head->input_dim()));
  for (Eigen::Index r = 0; r < head->w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < head->w1.cols(); ++c) write_f64(out, head->w1(r, c));
  }
  for (Eigen::Index r = 0; r < head->b1.size(); ++r) write_f64(out, head->b1[r]);
  for (Eigen::Index c = 0; c < head->w2.size(); ++c) write_f64(out, head->w2[c]);
  write_f64(out, head->b2);
}

std::optional<Mlp> read_head(std::istream& in) {
  if (read_u32(in) == 0) return std::nullopt;
  const std::uint32_t hidden = read_u32(in);
  const std::uint32_t input = read_u32(in);
  Mlp m;
  m.w1.resize(hidden, input);
  for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.w1.cols(); ++c) m.w1(r, c) = read_f64(in);
  }
  m.b1.resize(hidden);
  for (Eigen::Index r = 0; r < m.b1.size(); ++r) m.b1[r] = read_f64(in);
  m.w2.resize(hidden);
  for (Eigen::Index c = 0; c < m.w2.size(); ++c) m.w2(c) = read_f64(in);
  m.b2 = read_f64(in);
  return m;
}

}  // namespace

void save_policy(const PolicyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_policy: cannot open " + path);
  write_u32(out, kModelMagic);
  write_u32(out, 1);  // format version
  write_u32(out, static_cast<std::uint32_t>(model.obs.ray_count));
  write_f64(out, model.obs.fov);
  write_f64(out, model.obs.max_range);
  write_f64(out, model.obs.lateral_scale);
  write_f64(out, model.obs.heading_scale);
  write_f64(out, model.obs.speed_scale);
  write_f64(out, model.max_steer);
  write_head(out, model.detection);
  write_head(out, model.following);
  write_head(out, model.avoidance);
}

PolicyModel load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_policy: cannot open " + path);
  if (read_u32(in) != kModelMagic) throw std::runtime_error("load_policy: bad magic in " + path);
  if (read_u32(in) != 1) throw std::runtime_error("load_policy: unsupported version in " + path);

  PolicyModel model;
  model.obs.ray_count = static_cast<int>(read_u32(in));
  model.obs.fov = read_f64(in);
  model.obs.max_range = read_f64(in);
  model.obs.lateral_scale = read_f64(in);
  model.obs.heading_scale = read_f64(in);
  model.obs.speed_scale = read_f64(in);
  model.max_steer = read_f64(in);
  model.detection = read_head(in);
  model.following = read_head(in);
  model.avoidance = read_head(in);
  if (!in) throw std::runtime_error("load_policy: truncated file " + path);
  return model;
}

}  // namespace drivelab
