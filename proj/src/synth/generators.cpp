#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/QR>

#include "rlvi/errors.hpp"
#include "rlvi/synth.hpp"

namespace rlvi {

namespace {

Eigen::VectorXd normal_vector(Eigen::Index d, CounterRng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill so row i depends only on draws made before it.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

Eigen::VectorXd unit_vector(Eigen::Index d, CounterRng& rng) {
  for (;;) {
    Eigen::VectorXd v = normal_vector(d, rng);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
}

std::size_t checked_count(double epsilon, int n) {
  check_epsilon(epsilon);
  if (n <= 0) throw InvalidInput("sample count must be positive");
  const std::size_t count = corrupted_count(epsilon, static_cast<std::size_t>(n));
  if (count >= static_cast<std::size_t>(n)) throw InvalidInput("every sample would be corrupted");
  return count;
}

CorruptionMask mask_from(Eigen::Index n, const std::vector<Eigen::Index>& idx) {
  CorruptionMask mask(static_cast<std::size_t>(n), false);
  for (Eigen::Index i : idx) mask[static_cast<std::size_t>(i)] = true;
  return mask;
}

}  // namespace

void Pert::validate() const {
  if (!(std::isfinite(min) && std::isfinite(mode) && std::isfinite(max)) || !(min <= mode && mode <= max)) {
    throw InvalidInput("PERT requires min <= mode <= max");
  }
}

double Pert::alpha() const {
  return max > min ? 1.0 + 4.0 * (mode - min) / (max - min) : 1.0;
}

double Pert::beta() const {
  return max > min ? 1.0 + 4.0 * (max - mode) / (max - min) : 1.0;
}

void CorruptionSpec::validate() const {
  if (pert) {
    pert->validate();
    if (pert->min < 0.0 || pert->max >= 1.0) throw InvalidInput("PERT support must lie in [0, 1)");
  } else {
    check_epsilon(epsilon);
  }
}

std::size_t corrupted_count(double epsilon, std::size_t n) {
  return static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n) + 1e-9));
}

std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, std::size_t count, CounterRng& rng) {
  if (count > static_cast<std::size_t>(n)) throw InvalidInput("cannot draw more samples than exist");
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

LinRegDataset gen_linreg(int n, int d, double epsilon, std::uint64_t seed, const LinRegOptions& options) {
  if (d <= 0) throw InvalidInput("dimension must be positive");
  const std::size_t m = checked_count(epsilon, n);
  CounterRng rng(seed);

  LinRegDataset out;
  out.theta_star = unit_vector(d, rng);
  out.data.features = normal_matrix(n, d, rng);
  out.data.targets = out.data.features * out.theta_star + options.noise_sd * normal_vector(n, rng);

  const auto idx = sample_without_replacement(n, m, rng);
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i : idx) out.data.targets[i] += coin(rng) ? options.outlier_offset : -options.outlier_offset;
  out.corrupted = mask_from(n, idx);
  return out;
}

LogRegDataset gen_logreg(int n, int d, double epsilon, std::uint64_t seed, const LogRegOptions& options) {
  if (d < 2) throw InvalidInput("logistic regression needs at least one feature besides the intercept");
  const std::size_t m = checked_count(epsilon, n);
  CounterRng rng(seed);

  LogRegDataset out;
  out.theta_star = Eigen::VectorXd::Zero(d);
  out.theta_star.head(d - 1) = options.weight_norm * unit_vector(d - 1, rng);
  out.data.features.resize(n, d);
  out.data.features.leftCols(d - 1) = normal_matrix(n, d - 1, rng);
  out.data.features.col(d - 1).setOnes();

  const Eigen::VectorXd eta = out.data.features * out.theta_star;
  out.data.targets.resize(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-eta[i]));
    out.data.targets[i] = unif(rng) < p ? 1.0 : 0.0;
  }

  // Flip the samples the true hyperplane is most confident about.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(eta[a]) > std::abs(eta[b]); });
  order.resize(m);
  for (Eigen::Index i : order) out.data.targets[i] = 1.0 - out.data.targets[i];
  out.corrupted = mask_from(n, order);
  return out;
}

PcaDataset gen_pca(int n, int d, double epsilon, std::uint64_t seed, const PcaOptions& options) {
  if (d < 2) throw InvalidInput("PCA needs d >= 2");
  const std::size_t m = checked_count(epsilon, n);
  CounterRng rng(seed);

  PcaDataset out;
  out.theta_star = unit_vector(d, rng);
  Eigen::VectorXd across = normal_vector(d, rng);
  across -= across.dot(out.theta_star) * out.theta_star;
  across.normalize();
  const Eigen::VectorXd outlier_center =
      options.outlier_distance *
      (std::cos(options.outlier_angle) * across + std::sin(options.outlier_angle) * out.theta_star);

  const auto idx = sample_without_replacement(n, m, rng);
  out.corrupted = mask_from(n, idx);

  out.data.resize(n, d);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd g = normal_vector(d, rng);
    if (out.corrupted[static_cast<std::size_t>(i)]) {
      out.data.row(i) = (outlier_center + options.outlier_sd * g).transpose();
    } else {
      const double along = normal(rng);
      g -= g.dot(out.theta_star) * out.theta_star;
      out.data.row(i) = (options.major_sd * along * out.theta_star + options.minor_sd * g).transpose();
    }
  }
  return out;
}

GaussDataset gen_gauss(int n, int d, double epsilon, std::uint64_t seed, const GaussOptions& options) {
  if (d <= 0) throw InvalidInput("dimension must be positive");
  if (!(options.smallest_variance > 0.0 && options.largest_variance >= options.smallest_variance)) {
    throw InvalidInput("variance spectrum must be positive and ordered");
  }
  const std::size_t m = checked_count(epsilon, n);
  CounterRng rng(seed);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(d, d, rng));
  const Eigen::MatrixXd rotation = qr.householderQ();
  Eigen::VectorXd spectrum(d);
  for (int k = 0; k < d; ++k) {
    const double t = d == 1 ? 0.0 : static_cast<double>(k) / (d - 1);
    spectrum[k] = options.largest_variance * std::pow(options.smallest_variance / options.largest_variance, t);
  }

  GaussDataset out;
  out.mu_star = Eigen::VectorXd::Zero(d);
  out.sigma_star = rotation * spectrum.asDiagonal() * rotation.transpose();
  out.sigma_star = 0.5 * (out.sigma_star + out.sigma_star.transpose()).eval();
  const Eigen::MatrixXd root = rotation * spectrum.cwiseSqrt().asDiagonal();
  const Eigen::VectorXd outlier_center = options.outlier_distance * unit_vector(d, rng);

  const auto idx = sample_without_replacement(n, m, rng);
  out.corrupted = mask_from(n, idx);
  out.data.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd g = normal_vector(d, rng);
    if (out.corrupted[static_cast<std::size_t>(i)]) {
      out.data.row(i) = (outlier_center + options.outlier_sd * g).transpose();
    } else {
      out.data.row(i) = (out.mu_star + root * g).transpose();
    }
  }
  return out;
}

double pert_sample(const Pert& pert, CounterRng& rng) {
  pert.validate();
  if (pert.max == pert.min) return pert.min;
  std::gamma_distribution<double> ga(pert.alpha(), 1.0);
  std::gamma_distribution<double> gb(pert.beta(), 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double u = x / (x + y);
  return std::clamp(pert.min + u * (pert.max - pert.min), pert.min, pert.max);
}

CorruptionMask flip_positive_labels(Eigen::VectorXd& labels, double epsilon, CounterRng& rng) {
  check_epsilon(epsilon);
  std::vector<Eigen::Index> positives;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] == 1.0) positives.push_back(i);
  const std::size_t count = corrupted_count(epsilon, positives.size());
  const auto pick = sample_without_replacement(static_cast<Eigen::Index>(positives.size()), count, rng);
  CorruptionMask mask(static_cast<std::size_t>(labels.size()), false);
  for (Eigen::Index k : pick) {
    const Eigen::Index i = positives[static_cast<std::size_t>(k)];
    labels[i] = 0.0;
    mask[static_cast<std::size_t>(i)] = true;
  }
  return mask;
}

SyntheticStream::SyntheticStream(int n_batches, int batch_size, const Pert& pert, std::uint64_t seed,
                                 const StreamOptions& options)
    : n_batches_(n_batches), batch_size_(batch_size), pert_(pert), options_(options), rng_(seed) {
  if (n_batches < 0) throw InvalidInput("batch count must be nonnegative");
  if (batch_size < 2) throw InvalidInput("batch size must be at least 2");
  if (options.dim <= 0) throw InvalidInput("stream dimension must be positive");
  CorruptionSpec{CorruptionKind::label_flip_positive_only, 0.0, pert, seed}.validate();
  CounterRng geometry = rng_.split(0);
  direction_ = unit_vector(options.dim, geometry);
}

std::optional<BatchPair> SyntheticStream::next() {
  if (produced_ >= n_batches_) return std::nullopt;
  CounterRng rng = rng_.split(static_cast<std::uint64_t>(produced_) + 1);
  ++produced_;

  const int d = options_.dim;
  const int total = 2 * batch_size_;
  BatchPair pair;
  pair.epsilon_drawn = pert_sample(pert_, rng);

  Eigen::MatrixXd x(total, d + 1);
  Eigen::VectorXd y(total);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < total; ++i) {
    const bool positive = coin(rng);
    y[i] = positive ? 1.0 : 0.0;
    const double sign = positive ? 1.0 : -1.0;
    x.row(i).head(d) = (sign * options_.separation * direction_ + normal_vector(d, rng)).transpose();
    x(i, d) = 1.0;
  }
  pair.train = {x.topRows(batch_size_), y.head(batch_size_)};
  pair.test = {x.bottomRows(batch_size_), y.tail(batch_size_)};
  pair.train_corrupted = flip_positive_labels(pair.train.targets, pair.epsilon_drawn, rng);
  const auto flips = std::count(pair.train_corrupted.begin(), pair.train_corrupted.end(), true);
  pair.flip_fraction = static_cast<double>(flips) / batch_size_;
  return pair;
}

SyntheticStream gen_stream(int n_batches, int batch_size, const Pert& pert, std::uint64_t seed,
                           const StreamOptions& options) {
  return SyntheticStream(n_batches, batch_size, pert, seed, options);
}

LabelFlip flip_labels(const Eigen::VectorXi& labels, int classes, FlipKind kind, double epsilon,
                      std::uint64_t seed) {
  if (classes < 2) throw InvalidInput("label flipping needs at least two classes");
  // Flipping every label is a legitimate request here, unlike a mixture weight of 1.
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidInput("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  }
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) throw InvalidInput("label out of range");
  }
  CounterRng rng(seed);
  const std::size_t count = corrupted_count(epsilon, static_cast<std::size_t>(labels.size()));
  const auto idx = sample_without_replacement(labels.size(), count, rng);

  LabelFlip out{labels, mask_from(labels.size(), idx)};
  std::uniform_int_distribution<int> shift(1, classes - 1);
  for (Eigen::Index i : idx) {
    const int step = kind == FlipKind::pairflip ? 1 : shift(rng);
    out.labels[i] = (labels[i] + step) % classes;
  }
  return out;
}

BlobModel make_blob_model(int d, int classes, std::uint64_t seed, const BlobOptions& options) {
  if (d <= 0 || classes < 2) throw InvalidInput("blobs need d >= 1 and at least two classes");
  CounterRng rng(seed);
  BlobModel model;
  model.centers.resize(classes, d);
  for (int c = 0; c < classes; ++c) model.centers.row(c) = options.separation * unit_vector(d, rng).transpose();
  model.spread = options.spread;
  return model;
}

ClassificationSet sample_blobs(const BlobModel& model, int n, CounterRng& rng) {
  if (n <= 0) throw InvalidInput("sample count must be positive");
  const int classes = static_cast<int>(model.centers.rows());
  const Eigen::Index d = model.centers.cols();
  ClassificationSet set;
  set.classes = classes;
  set.features.resize(n, d);
  set.labels.resize(n);
  std::uniform_int_distribution<int> pick(0, classes - 1);
  for (int i = 0; i < n; ++i) {
    const int c = pick(rng);
    set.labels[i] = c;
    set.features.row(i) = model.centers.row(c) + model.spread * normal_vector(d, rng).transpose();
  }
  set.corrupted.assign(static_cast<std::size_t>(n), false);
  return set;
}

}  // namespace rlvi
