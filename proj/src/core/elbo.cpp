#include <algorithm>
#include <cmath>

#include "rlvi/core.hpp"

namespace rlvi {
namespace {

// p ln(p / q) with 0 ln 0 = 0. Callers guarantee q > 0 whenever p > 0.
double xlogx_over(double p, double q) {
  if (p <= 0.0) return 0.0;
  return p * (std::log(p) - std::log(q));
}

void require_finite(const Eigen::VectorXd& losses) {
  if (losses.size() == 0) throw InvalidInput("empty loss vector");
  if (!losses.allFinite()) throw InvalidInput("non-finite loss");
}

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

double negative_elbo(const Eigen::VectorXd& losses, const SampleWeights& weights) {
  require_finite(losses);
  if (weights.size() != losses.size()) throw InvalidInput("weights and losses differ in length");
  const double mean = weights.mean();
  double total = 0.0;
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    const double p = weights[i];
    total += p * losses[i] + xlogx_over(p, mean) + xlogx_over(1.0 - p, 1.0 - mean);
  }
  return total;
}

double kl_bernoulli(const SampleWeights& weights, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  if (weights.empty()) throw InvalidInput("empty weights");
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double p = weights[i];
    total += xlogx_over(p, 1.0 - epsilon) + xlogx_over(1.0 - p, epsilon);
  }
  return total;
}

double estimate_epsilon(const SampleWeights& weights) {
  const double eps = 1.0 - weights.mean();
  return std::clamp(eps, 0.0, 1.0);
}

double stationarity_residual(const Eigen::VectorXd& losses, const SampleWeights& weights) {
  require_finite(losses);
  if (weights.size() != losses.size()) throw InvalidInput("weights and losses differ in length");
  const Eigen::VectorXd target = fixed_point_sweep(losses, weights.mean());
  return (weights.values() - target).cwiseAbs().maxCoeff();
}

}  // namespace rlvi
