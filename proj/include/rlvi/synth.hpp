#pragma once

// Seeded synthetic data with controlled contamination. Every generator is a
// pure function of its arguments: the same seed gives bitwise-identical data.
//
// Distribution choices (all adjustable through the *Options structs):
//  - linreg: x ~ N(0, I), theta* uniform on the unit sphere, y = x'theta* +
//    N(0, 0.1^2); corrupted targets are shifted by +-10 with a random sign.
//  - logreg: two standard-normal features plus an intercept column,
//    theta* = (4 u, 0) with u uniform on the circle, y ~ Bernoulli(s(x'theta*));
//    the floor(eps n) samples farthest from the true hyperplane get flipped labels.
//  - pca: clean points have sd 5 along theta* and sd 1 across; corrupted
//    points form an isotropic cluster (sd 3) centred 8 units away, 0.3 rad off
//    the minor axis towards theta*.
//  - gauss: clean N(0, S*) with S* a random rotation of diag(1, ..., 0.25);
//    corrupted N(c, 2^2 I) with |c| = 8 in a random direction.
//  - stream: balanced binary classes at +-1.5 u along a random unit u in R^10,
//    unit isotropic noise, intercept column appended.
//  - blobs: class centres of norm 3 in random directions, unit isotropic noise.

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "rlvi/datasets.hpp"
#include "rlvi/models.hpp"
#include "rlvi/rng.hpp"

namespace rlvi {

struct Pert {
  double min = 0.0;
  double mode = 0.1;
  double max = 0.3;

  void validate() const;
  double alpha() const;  // 1 + 4 (mode - min) / (max - min)
  double beta() const;   // 1 + 4 (max - mode) / (max - min)
  double mean() const { return (min + 4.0 * mode + max) / 6.0; }
};

enum class CorruptionKind { regression_outlier, label_flip_symmetric, label_flip_positive_only, pairflip };

/// How a synthetic dataset is contaminated: a fixed level or a per-batch PERT.
struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::regression_outlier;
  double epsilon = 0.0;
  std::optional<Pert> pert;
  std::uint64_t seed = 0;

  void validate() const;
};

/// floor(eps * n), robust to representation error in eps.
std::size_t corrupted_count(double epsilon, std::size_t n);

/// `count` distinct indices of [0, n) in random order.
std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, std::size_t count,
                                                     CounterRng& rng);

// --- Regression and estimation problems -------------------------------------

struct LinRegOptions {
  double noise_sd = 0.1;
  double outlier_offset = 10.0;
};

struct LinRegDataset {
  LabeledData data;
  Eigen::VectorXd theta_star;
  CorruptionMask corrupted;
};

LinRegDataset gen_linreg(int n = 40, int d = 10, double epsilon = 0.2, std::uint64_t seed = 0,
                         const LinRegOptions& options = {});

struct LogRegOptions {
  double weight_norm = 4.0;
};

struct LogRegDataset {
  LabeledData data;             // last feature column is the constant 1
  Eigen::VectorXd theta_star;   // intercept (0) last
  CorruptionMask corrupted;
};

/// `d` counts all parameters including the intercept.
LogRegDataset gen_logreg(int n = 100, int d = 3, double epsilon = 0.05, std::uint64_t seed = 0,
                         const LogRegOptions& options = {});

struct PcaOptions {
  double major_sd = 5.0;
  double minor_sd = 1.0;
  double outlier_distance = 8.0;
  double outlier_angle = 0.3;
  double outlier_sd = 3.0;
};

struct PcaDataset {
  PointData data;
  Eigen::VectorXd theta_star;
  CorruptionMask corrupted;
};

PcaDataset gen_pca(int n = 40, int d = 2, double epsilon = 0.2, std::uint64_t seed = 0,
                   const PcaOptions& options = {});

struct GaussOptions {
  double largest_variance = 1.0;
  double smallest_variance = 0.25;
  double outlier_distance = 8.0;
  double outlier_sd = 2.0;
};

struct GaussDataset {
  PointData data;
  Eigen::VectorXd mu_star;
  Eigen::MatrixXd sigma_star;
  CorruptionMask corrupted;
};

GaussDataset gen_gauss(int n = 50, int d = 2, double epsilon = 0.2, std::uint64_t seed = 0,
                       const GaussOptions& options = {});

// --- Online stream ---------------------------------------------------------

/// Beta(alpha, beta) rescaled to [min, max]; min == max returns min.
double pert_sample(const Pert& pert, CounterRng& rng);

struct StreamOptions {
  int dim = 10;
  double separation = 1.5;
};

/// Synthetic binary stream. Each batch draws eps_b from the PERT, samples 2b
/// points, and flips floor(eps_b * positives) positive labels of the training
/// half only.
class SyntheticStream final : public BatchSource {
 public:
  SyntheticStream(int n_batches, int batch_size, const Pert& pert, std::uint64_t seed,
                  const StreamOptions& options = {});

  std::optional<BatchPair> next() override;
  int remaining() const noexcept { return n_batches_ - produced_; }

 private:
  int n_batches_;
  int batch_size_;
  Pert pert_;
  StreamOptions options_;
  Eigen::VectorXd direction_;
  CounterRng rng_;
  int produced_ = 0;
};

SyntheticStream gen_stream(int n_batches, int batch_size = 100, const Pert& pert = {},
                           std::uint64_t seed = 0, const StreamOptions& options = {});

/// Flips floor(eps * positives) positive labels (1 -> 0) chosen uniformly.
/// Returns the mask of flipped entries.
CorruptionMask flip_positive_labels(Eigen::VectorXd& labels, double epsilon, CounterRng& rng);

// --- Multiclass label noise -------------------------------------------------

enum class FlipKind { symmetric, pairflip };

struct LabelFlip {
  Eigen::VectorXi labels;
  CorruptionMask corrupted;
};

/// Selects exactly floor(eps n) samples without replacement. Symmetric noise
/// moves each selected label uniformly to one of the other C-1 classes;
/// pairflip maps c to (c + 1) mod C.
LabelFlip flip_labels(const Eigen::VectorXi& labels, int classes, FlipKind kind, double epsilon,
                      std::uint64_t seed);

struct BlobOptions {
  double separation = 3.0;
  double spread = 1.0;
};

struct BlobModel {
  Eigen::MatrixXd centers;  // classes x d
  double spread = 1.0;
};

BlobModel make_blob_model(int d, int classes, std::uint64_t seed, const BlobOptions& options = {});
ClassificationSet sample_blobs(const BlobModel& model, int n, CounterRng& rng);

}  // namespace rlvi
