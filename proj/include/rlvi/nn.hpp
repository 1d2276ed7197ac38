#pragma once

// A one-hidden-layer tanh network with softmax output, trained by momentum
// SGD where every sample's gradient is scaled by its clean probability. The
// probabilities are refreshed once per epoch from the losses seen during the
// epoch; once validation accuracy starts to drop, low-probability samples are
// cut off entirely.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rlvi/core.hpp"
#include "rlvi/datasets.hpp"
#include "rlvi/rng.hpp"

namespace rlvi {

struct Mlp {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;

  /// Zero-filled network of the given shape.
  Mlp(int input_dim, int hidden, int classes);

  /// Weights ~ N(0, 1/fan_in), zero biases.
  static Mlp random(int input_dim, int hidden, int classes, CounterRng& rng);

  int input_dim() const noexcept { return static_cast<int>(w1.cols()); }
  int hidden() const noexcept { return static_cast<int>(w1.rows()); }
  int classes() const noexcept { return static_cast<int>(w2.rows()); }
  Eigen::Index parameter_count() const noexcept;
  bool all_finite() const;

  /// All parameters as one vector (w1, b1, w2, b2; matrices column-major).
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  /// Row-wise softmax probabilities.
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& x) const;
  Eigen::VectorXi predict(const Eigen::MatrixXd& x) const;
};

/// Gradients share the network's shape.
using MlpGradient = Mlp;

struct ForwardBackward {
  Eigen::VectorXd losses;  // per-sample cross-entropy
  MlpGradient gradient;    // of sum_i w_i l_i
};

/// Per-sample softmax cross-entropy (log-sum-exp form) and the gradient of
/// the weighted sum by backpropagation. Throws SolverError on non-finite
/// activations.
ForwardBackward forward_backward(const Mlp& mlp, const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                                 const Eigen::VectorXd& weights);

double accuracy(const Mlp& mlp, const ClassificationSet& set);

/// True when the last entry is below the mean of the two before it.
bool detect_overfit(const std::vector<double>& val_acc_history);

struct TrainConfig {
  int hidden = 64;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  int epochs = 60;
  FixedPointConfig estep;
  bool robust = true;             // false trains the plain-SGD twin
  bool truncation = true;
  double type2_bound = 0.05;
  // Divide pi by its maximum before thresholding. Softmax losses measured
  // against a uniform label baseline cap clean probabilities well below 1,
  // which would make the 5% bound unattainable without rescaling.
  bool normalize_weights = true;
  std::uint64_t seed = 0;         // minibatch shuffling

  void validate() const;
};

struct TrainState {
  SampleWeights pi;              // weights applied to gradients
  SampleWeights estep_pi;        // raw E-step output, warm start for the next epoch
  Eigen::VectorXd loss_buffer;   // losses observed during the last epoch
  double tau = 0.0;
  bool overfit = false;
  std::vector<double> val_acc_history;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;       // mean buffered loss
  double val_accuracy = 0.0;
  std::optional<double> test_accuracy;
  double epsilon_hat = 0.0;
  double tau = 0.0;
  bool overfit = false;
  bool estep_converged = true;
  // With ground-truth masks: share of corrupted samples below the threshold,
  // and share of clean samples below it. The threshold is tau when
  // truncating, otherwise the bound-derived threshold of the current pi.
  std::optional<double> corrupted_identified;
  std::optional<double> clean_truncated;
};

struct TrainResult {
  Mlp model;
  TrainState state;
  std::vector<EpochMetrics> epochs;
};

/// Epoch-level robust training. `train.corrupted`, when nonempty, enables the
/// identification metrics; `test` adds per-epoch test accuracy.
TrainResult train_rlvi(Mlp mlp, const ClassificationSet& train, const ClassificationSet& validation,
                       const TrainConfig& config, const ClassificationSet* test = nullptr);

}  // namespace rlvi
