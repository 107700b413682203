#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drivelab/policy.hpp"

using namespace drivelab;

namespace {

// Head that ignores its input and returns a constant.
Mlp constant_head(int input_dim, double value) {
  Mlp m;
  m.w1 = Eigen::MatrixXd::Zero(4, input_dim);
  m.b1 = Eigen::VectorXd::Zero(4);
  m.w2 = Eigen::RowVectorXd::Zero(4);
  m.b2 = value;
  return m;
}

std::vector<RegressionSample> linear_dataset(int n, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd w(dim);
  for (int i = 0; i < dim; ++i) w[i] = u(rng);
  w *= 0.4 / w.norm();

  std::vector<RegressionSample> samples;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = u(rng);
    samples.push_back({x, w.dot(x)});
  }
  return samples;
}

}  // namespace

TEST_CASE("training defaults match the reference protocol") {
  const TrainConfig config;
  CHECK(config.batch_size == 128);
  CHECK(config.hidden == 100);
  CHECK(config.validation_fraction == doctest::Approx(0.1));
}

TEST_CASE("regressor fits a linearly realizable target") {
  const auto samples = linear_dataset(2000, 12, 21);
  TrainConfig config;
  config.hidden = 32;
  config.max_epochs = 200;
  config.seed = 5;
  const RegressorTraining r = train_regressor(samples, config, 1.0);
  CHECK(r.validation_loss < 1e-3);
}

TEST_CASE("regressor rejects an empty dataset") {
  TrainConfig config;
  CHECK_THROWS_AS(train_regressor({}, config, 0.5), std::invalid_argument);
}

TEST_CASE("classifier separates a linearly separable set") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<DetectionSample> samples;
  for (int i = 0; i < 1500; ++i) {
    DetectionSample s;
    s.window.resize(8);
    for (int j = 0; j < 8; ++j) s.window[j] = u(rng);
    const double margin = s.window[0] + 0.5 * s.window[1];
    if (std::abs(margin) < 0.1) continue;  // enforce a margin
    s.meta.label = margin > 0.0 ? Label::Danger : Label::Safe;
    samples.push_back(s);
  }
  TrainConfig config;
  config.hidden = 24;
  config.max_epochs = 150;
  config.seed = 3;
  const ClassifierTraining c = train_classifier(samples, config);
  CHECK(c.validation_accuracy > 0.99);
}

TEST_CASE("label-flipped duplicates cap accuracy near chance") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<DetectionSample> samples;
  for (int i = 0; i < 600; ++i) {
    DetectionSample s;
    s.window.resize(6);
    for (int j = 0; j < 6; ++j) s.window[j] = u(rng);
    s.meta.label = Label::Danger;
    samples.push_back(s);
    s.meta.label = Label::Safe;
    samples.push_back(s);  // identical row, flipped label
  }
  TrainConfig config;
  config.hidden = 16;
  config.max_epochs = 60;
  config.seed = 11;
  const ClassifierTraining c = train_classifier(samples, config);
  CHECK(c.validation_accuracy > 0.3);
  CHECK(c.validation_accuracy < 0.7);
}

TEST_CASE("classifier rejects single-class data") {
  std::vector<DetectionSample> samples(10);
  for (auto& s : samples) {
    s.window = Eigen::VectorXd::Zero(4);
    s.meta.label = Label::Danger;
  }
  TrainConfig config;
  CHECK_THROWS_AS(train_classifier(samples, config), std::invalid_argument);
}

TEST_CASE("gradient check stays under 1e-4") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  SUBCASE("fresh random model") {
    const Mlp m = make_mlp(10, 20, 99);
    Eigen::VectorXd x(10);
    for (int i = 0; i < 10; ++i) x[i] = u(rng);
    CHECK(gradient_check(m, x, 0.3, LossKind::SquaredError) < 1e-4);
    CHECK(gradient_check(m, x, 1.0, LossKind::LogisticCrossEntropy) < 1e-4);
  }
  SUBCASE("zero input sample") {
    const Mlp m = make_mlp(10, 20, 7);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
    CHECK(gradient_check(m, x, -0.2, LossKind::SquaredError) < 1e-4);
    CHECK(gradient_check(m, x, 0.0, LossKind::LogisticCrossEntropy) < 1e-4);
  }
  SUBCASE("post-training model") {
    const auto samples = linear_dataset(500, 6, 31);
    TrainConfig config;
    config.hidden = 12;
    config.max_epochs = 40;
    const RegressorTraining r = train_regressor(samples, config, 1.0);
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x[i] = u(rng);
    CHECK(gradient_check(r.model, x, 0.1, LossKind::SquaredError) < 1e-4);
  }
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto samples = linear_dataset(400, 8, 41);
  TrainConfig config;
  config.hidden = 10;
  config.max_epochs = 25;
  config.seed = 12345;
  const RegressorTraining a = train_regressor(samples, config, 1.0);
  const RegressorTraining b = train_regressor(samples, config, 1.0);
  CHECK(a.model.w1 == b.model.w1);
  CHECK(a.model.b1 == b.model.b1);
  CHECK(a.model.w2 == b.model.w2);
  CHECK(a.model.b2 == b.model.b2);
}

TEST_CASE("gate selects exactly one head") {
  PolicyModel model;
  const int dim = model.obs.dim() * ObservationWindow::kLength;
  model.following = constant_head(dim, 0.2);
  model.avoidance = constant_head(dim, -0.6);
  const Eigen::VectorXd window = Eigen::VectorXd::Zero(dim);

  SUBCASE("detection score 0 routes to Following") {
    model.detection = constant_head(dim, -50.0);  // sigmoid ~ 0
    const GateDecision d = act(model, window);
    CHECK_FALSE(d.used_avoidance);
    CHECK(d.steer == doctest::Approx(0.2 * model.max_steer));
  }
  SUBCASE("detection score 1 routes to Avoidance") {
    model.detection = constant_head(dim, 50.0);  // sigmoid ~ 1
    const GateDecision d = act(model, window);
    CHECK(d.used_avoidance);
    CHECK(d.steer == doctest::Approx(-0.6 * model.max_steer));
  }
  SUBCASE("steer is clamped to max_steer") {
    model.detection = constant_head(dim, 50.0);
    model.avoidance = constant_head(dim, -3.0);  // beyond the normalized range
    const GateDecision d = act(model, window);
    CHECK(d.steer == doctest::Approx(-model.max_steer));
    CHECK(std::abs(d.steer) <= model.max_steer);
  }
  SUBCASE("no detection head defaults to Following") {
    const GateDecision d = act(model, window);
    CHECK_FALSE(d.used_avoidance);
    CHECK(d.steer == doctest::Approx(0.2 * model.max_steer));
  }
}

TEST_CASE("constant observation stream yields a constant action") {
  PolicyModel model;
  const int dim = model.obs.dim() * ObservationWindow::kLength;
  model.detection = constant_head(dim, -50.0);
  model.following = make_mlp(dim, 16, 77);
  model.avoidance = constant_head(dim, 0.0);

  Observation obs;
  obs.rays = Eigen::VectorXd::Constant(model.obs.ray_count, 37.0);
  obs.lateral_offset = -1.2;
  obs.heading_error = 0.05;
  obs.speed = 20.0;

  ObservationWindow window;
  std::optional<double> steer;
  for (int i = 0; i < 12; ++i) {
    window.push(obs);
    const double s = act(model, window.flatten_normalized(model.obs)).steer;
    if (steer) CHECK(s == doctest::Approx(*steer));
    steer = s;
  }
}

TEST_CASE("policy serialization round-trips") {
  PolicyModel model;
  const int dim = model.obs.dim() * ObservationWindow::kLength;
  model.detection = make_mlp(dim, 100, 1);
  model.following = make_mlp(dim, 100, 2);
  model.avoidance = make_mlp(dim, 100, 3);

  save_policy(model, "/tmp/drivelab_test_model.bin");
  const PolicyModel loaded = load_policy("/tmp/drivelab_test_model.bin");
  REQUIRE(loaded.detection.has_value());
  REQUIRE(loaded.following.has_value());
  REQUIRE(loaded.avoidance.has_value());

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = u(rng);
  CHECK(model.detection->forward(x) == loaded.detection->forward(x));
  CHECK(model.following->forward(x) == loaded.following->forward(x));
  CHECK(model.avoidance->forward(x) == loaded.avoidance->forward(x));

  CHECK_THROWS_AS(load_policy("/tmp/definitely_missing_model.bin"), std::runtime_error);
}
