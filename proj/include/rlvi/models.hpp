#pragma once

// Per-sample negative log-likelihoods and weighted maximum-likelihood fits for
// the benchmark model families, plus adapters exposing each family through
// the RobustModel contract consumed by the EM driver.

#include <concepts>
#include <numbers>

#include <Eigen/Core>

#include "rlvi/errors.hpp"
#include "rlvi/weights.hpp"

namespace rlvi {

/// Design matrix (one sample per row) with a real target per row. Logistic
/// regression stores labels in {0, 1} in `targets` and carries its intercept
/// as the last feature column.
struct LabeledData {
  Eigen::MatrixXd features;
  Eigen::VectorXd targets;

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dim() const noexcept { return features.cols(); }
};

/// Points stored one per row.
using PointData = Eigen::MatrixXd;

inline constexpr double kVarianceFloor = 1e-12;

// ---------------------------------------------------------------------------
// Linear regression with Gaussian noise.

struct LinRegParams {
  Eigen::VectorXd theta;
  double sigma2 = 1.0;
};

/// (y - x'theta)^2 / (2 sigma2) + ln(2 pi sigma2) / 2
Eigen::VectorXd linreg_loss(const LabeledData& data, const LinRegParams& params);

/// Weighted least squares via column-pivoting QR on the rows with nonzero
/// weight; sigma2 is the weighted mean squared residual, floored.
LinRegParams wls_fit(const LabeledData& data, const SampleWeights& weights);

/// Gradient of sum_i w_i l_i with respect to (theta, sigma2).
Eigen::VectorXd linreg_weighted_gradient(const LabeledData& data, const LinRegParams& params,
                                         const Eigen::VectorXd& weights);

// ---------------------------------------------------------------------------
// Binary logistic regression.

struct LogRegParams {
  Eigen::VectorXd theta;
};

struct LogRegFitOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
  double ridge = 1e-8;
};

/// Cross-entropy -y ln s(x'theta) - (1-y) ln(1 - s(x'theta)) in softplus form.
Eigen::VectorXd logreg_loss(const LabeledData& data, const LogRegParams& params);

/// Damped Newton (IRLS) on sum_i w_i l_i(theta). Throws FitError carrying the
/// last iterate if the gradient tolerance is not met.
LogRegParams logreg_fit(const LabeledData& data, const SampleWeights& weights,
                        const LogRegFitOptions& options = {});

Eigen::VectorXd logreg_weighted_gradient(const LabeledData& data, const LogRegParams& params,
                                         const Eigen::VectorXd& weights);

class LogRegFitError : public FitError {
 public:
  LogRegFitError(const std::string& what, LogRegParams last)
      : FitError(what), last_(std::move(last)) {}
  const LogRegParams& last_iterate() const noexcept { return last_; }

 private:
  LogRegParams last_;
};

// ---------------------------------------------------------------------------
// Leading principal direction with a Gaussian residual off the subspace.

struct PcaParams {
  Eigen::VectorXd theta;   // unit norm
  Eigen::VectorXd center;  // weighted mean the data is centred by
  double sigma2 = 1.0;     // residual variance per orthogonal dimension
};

/// ||r||^2 / (2 sigma2) + (d-1) ln(2 pi sigma2) / 2 with r = (I - theta theta')(z - center).
Eigen::VectorXd pca_loss(const PointData& data, const PcaParams& params);

/// Leading eigenvector of the weighted covariance, sign-normalised so the
/// first nonzero coordinate is positive.
PcaParams pca_fit(const PointData& data, const SampleWeights& weights);

/// Gradient of sum_i w_i l_i with respect to (theta, sigma2) at fixed centre,
/// treating theta as unconstrained in the residual formula.
Eigen::VectorXd pca_weighted_gradient(const PointData& data, const PcaParams& params,
                                      const Eigen::VectorXd& weights);

// ---------------------------------------------------------------------------
// Multivariate Gaussian (covariance estimation).

struct GaussParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
};

/// [(z-mu)' S^-1 (z-mu) + ln det S + d ln 2 pi] / 2. Throws InvalidInput when
/// S is not positive definite (min eigenvalue <= 1e-12).
Eigen::VectorXd gauss_loss(const PointData& data, const GaussParams& params);

/// Weighted mean and weighted (biased) covariance, symmetrised. May be
/// singular.
GaussParams gauss_fit(const PointData& data, const SampleWeights& weights);

/// Gradient of sum_i w_i l_i: first d entries for mu, then the d*d entries of
/// dL/dS in column-major order (S treated as a general matrix).
Eigen::VectorXd gauss_weighted_gradient(const PointData& data, const GaussParams& params,
                                        const Eigen::VectorXd& weights);

// ---------------------------------------------------------------------------
// RobustModel contract.

/// A model family usable by the EM driver: per-sample losses, a weighted
/// M-step, a parameter distance for the stopping rule, and the log-density of
/// the contaminating distribution that E-step losses are measured against.
template <typename M>
concept RobustModel = requires(const M& model, const typename M::Data& data,
                               const typename M::Params& params, const SampleWeights& weights) {
  { model.per_sample_loss(data, params) } -> std::convertible_to<Eigen::VectorXd>;
  { model.weighted_fit(data, weights) } -> std::convertible_to<typename M::Params>;
  { model.param_distance(params, params) } -> std::convertible_to<double>;
  { model.outlier_log_density(data) } -> std::convertible_to<double>;
  { model.sample_count(data) } -> std::convertible_to<Eigen::Index>;
};

// Log-density of a uniform distribution over the per-coordinate range of each
// column: -sum_k ln(max_k - min_k). Columns with zero range contribute 0.
double uniform_box_log_density(const Eigen::MatrixXd& columns);

struct LinearRegressionModel {
  using Data = LabeledData;
  using Params = LinRegParams;

  Eigen::VectorXd per_sample_loss(const Data& d, const Params& p) const { return linreg_loss(d, p); }
  // wls_fit is invariant to a common scale of the weights. When the E-step
  // spreads its mass thinly (sum(pi) <= d although many samples carry weight),
  // the weights are rescaled by their maximum before fitting.
  Params weighted_fit(const Data& d, const SampleWeights& w) const;
  double param_distance(const Params& a, const Params& b) const;
  // Uniform outliers over the observed target range.
  double outlier_log_density(const Data& d) const { return uniform_box_log_density(d.targets); }
  Eigen::Index sample_count(const Data& d) const { return d.size(); }
};

struct LogisticRegressionModel {
  using Data = LabeledData;
  using Params = LogRegParams;

  LogRegFitOptions options;
  // Once low-weight samples are dropped the weighted data is often separable,
  // so no finite minimiser exists and IRLS runs out of iterations while theta
  // keeps growing along a separating direction. By default that last iterate
  // is returned (with a logged warning) instead of the FitError.
  bool keep_last_iterate = true;

  Eigen::VectorXd per_sample_loss(const Data& d, const Params& p) const { return logreg_loss(d, p); }
  Params weighted_fit(const Data& d, const SampleWeights& w) const;
  double param_distance(const Params& a, const Params& b) const { return (a.theta - b.theta).norm(); }
  // Corrupted labels are uniform over the two classes.
  double outlier_log_density(const Data&) const { return -std::numbers::ln2; }
  Eigen::Index sample_count(const Data& d) const { return d.size(); }
};

struct PcaModel {
  using Data = PointData;
  using Params = PcaParams;

  Eigen::VectorXd per_sample_loss(const Data& d, const Params& p) const { return pca_loss(d, p); }
  Params weighted_fit(const Data& d, const SampleWeights& w) const { return pca_fit(d, w); }
  // 1 - |cos| between directions, invariant to the sign of theta.
  double param_distance(const Params& a, const Params& b) const;
  // Uniform over a cube of the largest coordinate range, in the d-1
  // dimensions the residual lives in.
  double outlier_log_density(const Data& d) const;
  Eigen::Index sample_count(const Data& d) const { return d.rows(); }
};

struct GaussianModel {
  using Data = PointData;
  using Params = GaussParams;

  Eigen::VectorXd per_sample_loss(const Data& d, const Params& p) const { return gauss_loss(d, p); }
  Params weighted_fit(const Data& d, const SampleWeights& w) const { return gauss_fit(d, w); }
  double param_distance(const Params& a, const Params& b) const;
  double outlier_log_density(const Data& d) const { return uniform_box_log_density(d); }
  Eigen::Index sample_count(const Data& d) const { return d.rows(); }
};

static_assert(RobustModel<LinearRegressionModel>);
static_assert(RobustModel<LogisticRegressionModel>);
static_assert(RobustModel<PcaModel>);
static_assert(RobustModel<GaussianModel>);

}  // namespace rlvi
