#pragma once

// Stochastic RLVI for streaming binary classification: each arriving batch
// gets its own E-step over per-sample clean probabilities, followed by a
// gradient step on the pi-weighted logistic loss.

#include <cstdint>
#include <optional>
#include <vector>

#include "rlvi/core.hpp"
#include "rlvi/datasets.hpp"
#include "rlvi/models.hpp"
#include "rlvi/synth.hpp"

namespace rlvi {

struct SgdConfig {
  double learning_rate = 0.05;
  int batch_size = 100;
  FixedPointConfig estep;
  int steps_per_batch = 1;

  void validate() const;
};

struct SgdStep {
  LogRegParams params;
  SampleWeights weights;
  double epsilon_hat = 0.0;
  bool fallback = false;         // degenerate E-step, unit weights used
  bool estep_converged = true;
};

/// theta - lr * sum_i w_i grad l_i. Throws SolverError (and leaves the caller's
/// params untouched) when the gradient is not finite.
LogRegParams weighted_sgd_step(const LogRegParams& params, const LabeledData& batch,
                               const Eigen::VectorXd& weights, double learning_rate);

/// Per-batch E-step on logistic losses measured against uniform label noise,
/// then one weighted gradient step. Each call starts the E-step afresh.
SgdStep rlvi_sgd_step(const LogRegParams& params, const LabeledData& batch, const SgdConfig& config);

struct OnlineRecord {
  double epsilon_true = 0.0;  // flipped share of the training half
  double epsilon_hat = 0.0;   // 0 for plain SGD
  double accuracy = 0.0;
  double recall = 0.0;        // 1 when the test half has no positives
  bool fallback = false;
};

struct OnlineMetrics {
  std::vector<OnlineRecord> rlvi;
  std::vector<OnlineRecord> plain;  // empty unless the twin was requested
  LogRegParams rlvi_params;
  LogRegParams plain_params;
  int estep_failures = 0;
};

struct OnlineConfig {
  SgdConfig sgd;
  bool plain_twin = true;
};

/// Accuracy and recall of the rule x'theta >= 0 on labelled data.
std::pair<double, double> accuracy_recall(const LogRegParams& params, const LabeledData& data);

/// Runs the stream to exhaustion starting from `init` (zeros when empty).
OnlineMetrics online_run(BatchSource& source, const OnlineConfig& config, LogRegParams init = {});

/// Mean of `values` over the last `count` entries (all when fewer).
double tail_mean(const std::vector<double>& values, std::size_t count);

/// Trailing moving average with the given window; the first entries average
/// what is available.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

/// Streams consecutive 2b-row chunks of a binary dataset (labels 0/1), flipping
/// positive labels in each training half at a PERT-drawn rate. An intercept
/// column is appended unless the data already ends with one. A trailing
/// partial chunk is dropped.
class DatasetBatchSource final : public BatchSource {
 public:
  DatasetBatchSource(LabeledData data, int batch_size, const Pert& pert, std::uint64_t seed,
                     bool append_intercept = true);

  std::optional<BatchPair> next() override;

 private:
  LabeledData data_;
  int batch_size_;
  Pert pert_;
  CounterRng rng_;
  Eigen::Index cursor_ = 0;
  std::uint64_t produced_ = 0;
};

}  // namespace rlvi
