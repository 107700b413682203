#pragma once

#include <Eigen/Core>
#include <vector>

namespace drivelab {

// Scalar-output network with one tanh hidden layer. Classification heads
// produce a logit; callers apply the sigmoid.
struct Mlp {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::RowVectorXd w2;  // 1 x hidden
  double b2 = 0.0;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }

  double forward(const Eigen::VectorXd& x) const;
  // Columns of X are samples.
  Eigen::VectorXd forward_batch(const Eigen::MatrixXd& X) const;

  std::size_t parameter_count() const;
};

Mlp make_mlp(int input_dim, int hidden_dim, unsigned long long seed);

enum class LossKind { SquaredError, LogisticCrossEntropy };

double sigmoid(double z);

// Mean loss over columns of X.
double mean_loss(const Mlp& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 LossKind loss);

struct TrainConfig {
  int hidden = 100;
  int batch_size = 128;
  int max_epochs = 120;
  int patience = 20;          // epochs without validation improvement
  double learning_rate = 0.02;
  double momentum = 0.9;
  double validation_fraction = 0.1;
  unsigned long long seed = 0;
};

struct TrainResult {
  Mlp model;                  // parameters at the best validation epoch
  double best_validation_loss = 0.0;
  double validation_accuracy = 0.0;  // classification only
  int epochs_run = 0;
  std::vector<double> train_loss_history;
};

// Mini-batch momentum SGD with a 90/10 train/validation split; returns the
// model with the best validation loss. Deterministic for a fixed seed.
TrainResult train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                      const TrainConfig& config);

// Max relative error between analytic and central-difference gradients of the
// per-sample loss, over all parameters.
double gradient_check(const Mlp& model, const Eigen::VectorXd& x, double y, LossKind loss,
                      double step = 1e-5);

}  // namespace drivelab
