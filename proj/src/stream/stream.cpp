#include "rlvi/stream.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <string>

#include "rlvi/log.hpp"

namespace rlvi {

void SgdConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("learning rate must be finite and nonnegative");
  }
  if (batch_size < 2) throw InvalidInput("batch size must be at least 2");
  if (steps_per_batch < 1) throw InvalidInput("steps per batch must be at least 1");
  estep.validate();
}

LogRegParams weighted_sgd_step(const LogRegParams& params, const LabeledData& batch,
                               const Eigen::VectorXd& weights, double learning_rate) {
  if (batch.size() == 0) throw InvalidInput("empty batch");
  const Eigen::VectorXd grad = logreg_weighted_gradient(batch, params, weights);
  if (!grad.allFinite()) throw SolverError("non-finite gradient; step rejected");
  return {params.theta - learning_rate * grad};
}

SgdStep rlvi_sgd_step(const LogRegParams& params, const LabeledData& batch, const SgdConfig& config) {
  if (batch.size() == 0) throw InvalidInput("empty batch");
  const Eigen::VectorXd losses = (logreg_loss(batch, params).array() - std::numbers::ln2).matrix();

  SgdStep step;
  EStepResult estep;
  try {
    estep = fixed_point_estep(losses, std::nullopt, config.estep);
  } catch (const EStepConvergenceError& e) {
    estep = e.last_iterate();
    step.estep_converged = false;
  }
  if (estep.collapse == Collapse::all_corrupted) {
    log_warning("batch E-step collapsed to all-corrupted; using unit weights");
    step.fallback = true;
    estep.weights = SampleWeights::ones(batch.size());
  } else if (estep.collapse == Collapse::all_clean) {
    estep.weights = SampleWeights::ones(batch.size());
  }
  step.weights = estep.weights;
  step.epsilon_hat = estimate_epsilon(step.weights);
  step.params = weighted_sgd_step(params, batch, step.weights.values(), config.learning_rate);
  return step;
}

std::pair<double, double> accuracy_recall(const LogRegParams& params, const LabeledData& data) {
  if (data.size() == 0) throw InvalidInput("empty evaluation set");
  const Eigen::VectorXd eta = data.features * params.theta;
  Eigen::Index correct = 0, positives = 0, hits = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const bool predicted = eta[i] >= 0.0;
    const bool actual = data.targets[i] == 1.0;
    correct += predicted == actual;
    positives += actual;
    hits += actual && predicted;
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  const double recall = positives == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(positives);
  return {accuracy, recall};
}

OnlineMetrics online_run(BatchSource& source, const OnlineConfig& config, LogRegParams init) {
  config.sgd.validate();
  OnlineMetrics out;
  bool initialised = init.theta.size() > 0;
  LogRegParams robust = init;
  LogRegParams plain = init;

  while (auto pair = source.next()) {
    if (!initialised) {
      robust.theta = plain.theta = Eigen::VectorXd::Zero(pair->train.dim());
      initialised = true;
    }
    if (robust.theta.size() != pair->train.dim()) throw InvalidInput("batch dimension changed mid-stream");

    OnlineRecord record;
    record.epsilon_true = pair->flip_fraction;
    for (int s = 0; s < config.sgd.steps_per_batch; ++s) {
      SgdStep step = rlvi_sgd_step(robust, pair->train, config.sgd);
      robust = std::move(step.params);
      record.epsilon_hat = step.epsilon_hat;
      record.fallback = record.fallback || step.fallback;
      out.estep_failures += !step.estep_converged;
    }
    std::tie(record.accuracy, record.recall) = accuracy_recall(robust, pair->test);
    out.rlvi.push_back(record);

    if (config.plain_twin) {
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(pair->train.size());
      for (int s = 0; s < config.sgd.steps_per_batch; ++s) {
        plain = weighted_sgd_step(plain, pair->train, ones, config.sgd.learning_rate);
      }
      OnlineRecord twin;
      twin.epsilon_true = pair->flip_fraction;
      std::tie(twin.accuracy, twin.recall) = accuracy_recall(plain, pair->test);
      out.plain.push_back(twin);
    }
  }
  out.rlvi_params = robust;
  out.plain_params = plain;
  return out;
}

double tail_mean(const std::vector<double>& values, std::size_t count) {
  if (values.empty()) throw InvalidInput("tail mean of an empty sequence");
  const std::size_t k = std::min(count, values.size());
  return std::accumulate(values.end() - static_cast<std::ptrdiff_t>(k), values.end(), 0.0) / static_cast<double>(k);
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw InvalidInput("moving-average window must be positive");
  std::vector<double> out(values.size());
  double running = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    running += values[i];
    if (i >= window) running -= values[i - window];
    out[i] = running / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

DatasetBatchSource::DatasetBatchSource(LabeledData data, int batch_size, const Pert& pert, std::uint64_t seed,
                                       bool append_intercept)
    : data_(std::move(data)), batch_size_(batch_size), pert_(pert), rng_(seed) {
  if (batch_size < 2) throw InvalidInput("batch size must be at least 2");
  CorruptionSpec{CorruptionKind::label_flip_positive_only, 0.0, pert, seed}.validate();
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    if (data_.targets[i] != 0.0 && data_.targets[i] != 1.0) {
      throw InvalidInput("stream labels must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
  }
  const bool has_intercept = data_.dim() > 0 && (data_.features.col(data_.dim() - 1).array() == 1.0).all();
  if (append_intercept && !has_intercept) {
    data_.features.conservativeResize(Eigen::NoChange, data_.dim() + 1);
    data_.features.col(data_.dim() - 1).setOnes();
  }
}

std::optional<BatchPair> DatasetBatchSource::next() {
  const Eigen::Index b = batch_size_;
  if (cursor_ + 2 * b > data_.size()) return std::nullopt;
  CounterRng rng = rng_.split(produced_++);
  BatchPair pair;
  pair.epsilon_drawn = pert_sample(pert_, rng);
  pair.train = {data_.features.middleRows(cursor_, b), data_.targets.segment(cursor_, b)};
  pair.test = {data_.features.middleRows(cursor_ + b, b), data_.targets.segment(cursor_ + b, b)};
  cursor_ += 2 * b;
  pair.train_corrupted = flip_positive_labels(pair.train.targets, pair.epsilon_drawn, rng);
  const auto flips = std::count(pair.train_corrupted.begin(), pair.train_corrupted.end(), true);
  pair.flip_fraction = static_cast<double>(flips) / static_cast<double>(b);
  return pair;
}

}  // namespace rlvi
