#include "drivelab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace drivelab {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double Mlp::forward(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd h = (w1 * x + b1).array().tanh();
  return w2.dot(h) + b2;
}

Eigen::VectorXd Mlp::forward_batch(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd h = ((w1 * X).colwise() + b1).array().tanh();
  return (w2 * h).transpose().array() + b2;
}

std::size_t Mlp::parameter_count() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size()) + 1;
}

Mlp make_mlp(int input_dim, int hidden_dim, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  const double limit1 = std::sqrt(6.0 / (input_dim + hidden_dim));
  const double limit2 = std::sqrt(6.0 / (hidden_dim + 1));
  std::uniform_real_distribution<double> u1(-limit1, limit1);
  std::uniform_real_distribution<double> u2(-limit2, limit2);

  Mlp m;
  m.w1.resize(hidden_dim, input_dim);
  for (int r = 0; r < hidden_dim; ++r) {
    for (int c = 0; c < input_dim; ++c) m.w1(r, c) = u1(rng);
  }
  m.b1 = Eigen::VectorXd::Zero(hidden_dim);
  // Output weights start near zero so initial predictions sit at the origin
  // of the normalized target range.
  m.w2.resize(hidden_dim);
  for (int c = 0; c < hidden_dim; ++c) m.w2(c) = 0.05 * u2(rng);
  m.b2 = 0.0;
  return m;
}

namespace {

double loss_value(double z, double y, LossKind loss) {
  if (loss == LossKind::SquaredError) {
    const double e = z - y;
    return e * e;
  }
  // Numerically stable binary cross entropy with logits.
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

double loss_dz(double z, double y, LossKind loss) {
  if (loss == LossKind::SquaredError) return 2.0 * (z - y);
  return sigmoid(z) - y;
}

}  // namespace

double mean_loss(const Mlp& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 LossKind loss) {
  const Eigen::VectorXd z = model.forward_batch(X);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += loss_value(z[i], y[i], loss);
  return total / static_cast<double>(z.size());
}

TrainResult train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                      const TrainConfig& config) {
  const Eigen::Index n = X.cols();
  if (n == 0) throw std::invalid_argument("train_mlp: empty dataset");

  std::mt19937_64 rng(config.seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const Eigen::Index n_val =
      std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(
                                        std::llround(config.validation_fraction * n)));
  const Eigen::Index n_train = n - n_val;

  Eigen::MatrixXd Xt(X.rows(), n_train), Xv(X.rows(), std::max<Eigen::Index>(n_val, 1));
  Eigen::VectorXd yt(n_train), yv(std::max<Eigen::Index>(n_val, 1));
  for (Eigen::Index i = 0; i < n_train; ++i) {
    Xt.col(i) = X.col(order[i]);
    yt[i] = y[order[i]];
  }
  if (n_val == 0) {
    Xv.col(0) = Xt.col(0);
    yv[0] = yt[0];
  } else {
    for (Eigen::Index i = 0; i < n_val; ++i) {
      Xv.col(i) = X.col(order[n_train + i]);
      yv[i] = y[order[n_train + i]];
    }
  }

  Mlp model = make_mlp(static_cast<int>(X.rows()), config.hidden, rng());

  Eigen::MatrixXd vw1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  Eigen::VectorXd vb1 = Eigen::VectorXd::Zero(model.b1.size());
  Eigen::RowVectorXd vw2 = Eigen::RowVectorXd::Zero(model.w2.size());
  double vb2 = 0.0;

  TrainResult result;
  result.model = model;
  result.best_validation_loss = mean_loss(model, Xv, yv, loss);

  std::vector<Eigen::Index> epoch_order(n_train);
  std::iota(epoch_order.begin(), epoch_order.end(), 0);

  int since_best = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(epoch_order.begin(), epoch_order.end(), rng);

    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < n_train; start += config.batch_size) {
      const Eigen::Index count = std::min<Eigen::Index>(config.batch_size, n_train - start);
      Eigen::MatrixXd Xb(X.rows(), count);
      Eigen::VectorXd yb(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        Xb.col(i) = Xt.col(epoch_order[start + i]);
        yb[i] = yt[epoch_order[start + i]];
      }

      const Eigen::MatrixXd z1 = (model.w1 * Xb).colwise() + model.b1;
      const Eigen::MatrixXd h = z1.array().tanh();
      const Eigen::VectorXd z = (model.w2 * h).transpose().array() + model.b2;

      Eigen::VectorXd dz(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        dz[i] = loss_dz(z[i], yb[i], loss);
        epoch_loss += loss_value(z[i], yb[i], loss);
      }
      const double inv = 1.0 / static_cast<double>(count);

      const Eigen::RowVectorXd gw2 = (h * dz).transpose() * inv;
      const double gb2 = dz.sum() * inv;
      const Eigen::MatrixXd dh =
          (model.w2.transpose() * dz.transpose()).array() * (1.0 - h.array().square());
      const Eigen::MatrixXd gw1 = dh * Xb.transpose() * inv;
      const Eigen::VectorXd gb1 = dh.rowwise().sum() * inv;

      vw1 = config.momentum * vw1 - config.learning_rate * gw1;
      vb1 = config.momentum * vb1 - config.learning_rate * gb1;
      vw2 = config.momentum * vw2 - config.learning_rate * gw2;
      vb2 = config.momentum * vb2 - config.learning_rate * gb2;
      model.w1 += vw1;
      model.b1 += vb1;
      model.w2 += vw2;
      model.b2 += vb2;
    }
    result.train_loss_history.push_back(epoch_loss / static_cast<double>(n_train));
    result.epochs_run = epoch + 1;

    const double val = mean_loss(model, Xv, yv, loss);
    if (val < result.best_validation_loss) {
      result.best_validation_loss = val;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  if (loss == LossKind::LogisticCrossEntropy) {
    const Eigen::VectorXd z = result.model.forward_batch(Xv);
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if ((sigmoid(z[i]) >= 0.5) == (yv[i] >= 0.5)) ++correct;
    }
    result.validation_accuracy = static_cast<double>(correct) / static_cast<double>(z.size());
  }
  return result;
}

double gradient_check(const Mlp& model, const Eigen::VectorXd& x, double y, LossKind loss,
                      double step) {
  // Analytic gradient for one sample.
  const Eigen::VectorXd z1 = model.w1 * x + model.b1;
  const Eigen::VectorXd h = z1.array().tanh();
  const double z = model.w2.dot(h) + model.b2;
  const double dz = loss_dz(z, y, loss);

  const Eigen::RowVectorXd gw2 = dz * h.transpose();
  const double gb2 = dz;
  const Eigen::VectorXd dh = dz * model.w2.transpose().array() * (1.0 - h.array().square());
  const Eigen::MatrixXd gw1 = dh * x.transpose();
  const Eigen::VectorXd gb1 = dh;

  Mlp probe = model;
  auto numeric = [&](double* param) {
    const double saved = *param;
    *param = saved + step;
    const double up = loss_value(probe.forward(x), y, loss);
    *param = saved - step;
    const double down = loss_value(probe.forward(x), y, loss);
    *param = saved;
    return (up - down) / (2.0 * step);
  };
  auto relative = [](double analytic, double estimate) {
    const double denom = std::max(1e-3, std::abs(analytic) + std::abs(estimate));
    return std::abs(analytic - estimate) / denom;
  };

  double worst = 0.0;
  for (Eigen::Index r = 0; r < probe.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < probe.w1.cols(); ++c) {
      worst = std::max(worst, relative(gw1(r, c), numeric(&probe.w1(r, c))));
    }
  }
  for (Eigen::Index r = 0; r < probe.b1.size(); ++r) {
    worst = std::max(worst, relative(gb1[r], numeric(&probe.b1[r])));
  }
  for (Eigen::Index c = 0; c < probe.w2.size(); ++c) {
    worst = std::max(worst, relative(gw2[c], numeric(&probe.w2[c])));
  }
  worst = std::max(worst, relative(gb2, numeric(&probe.b2)));
  return worst;
}

}  // namespace drivelab
