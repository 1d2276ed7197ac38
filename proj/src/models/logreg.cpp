#include <cmath>

#include <Eigen/Dense>

#include "rlvi/core.hpp"
#include "rlvi/log.hpp"
#include "rlvi/models.hpp"

namespace rlvi {
namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

void check_shapes(const LabeledData& data, const Eigen::VectorXd& theta) {
  if (data.features.rows() != data.targets.size()) {
    throw InvalidInput("feature rows and label count differ");
  }
  if (theta.size() != data.dim()) throw InvalidInput("theta length differs from feature count");
}

double weighted_objective(const LabeledData& data, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& weights) {
  const Eigen::VectorXd eta = data.features * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double y = data.targets[i];
    total += weights[i] * (y * softplus(-eta[i]) + (1.0 - y) * softplus(eta[i]));
  }
  return total;
}

}  // namespace

Eigen::VectorXd logreg_loss(const LabeledData& data, const LogRegParams& params) {
  check_shapes(data, params.theta);
  const Eigen::VectorXd eta = data.features * params.theta;
  Eigen::VectorXd loss(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double y = data.targets[i];
    loss[i] = y * softplus(-eta[i]) + (1.0 - y) * softplus(eta[i]);
  }
  return loss;
}

Eigen::VectorXd logreg_weighted_gradient(const LabeledData& data, const LogRegParams& params,
                                         const Eigen::VectorXd& weights) {
  check_shapes(data, params.theta);
  const Eigen::VectorXd eta = data.features * params.theta;
  Eigen::VectorXd coef(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    coef[i] = weights[i] * (sigmoid(eta[i]) - data.targets[i]);
  }
  return data.features.transpose() * coef;
}

LogRegParams logreg_fit(const LabeledData& data, const SampleWeights& weights,
                        const LogRegFitOptions& options) {
  if (weights.size() != data.size()) throw InvalidInput("weights length differs from sample count");
  if (!(weights.sum() > 0.0)) throw InvalidInput("weights sum to zero");
  const Eigen::Index d = data.dim();
  const Eigen::VectorXd& w = weights.values();

  LogRegParams params{Eigen::VectorXd::Zero(d)};
  check_shapes(data, params.theta);
  const Eigen::MatrixXd ridge = options.ridge * Eigen::MatrixXd::Identity(d, d);

  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd grad = logreg_weighted_gradient(data, params, w);
    if (grad.cwiseAbs().maxCoeff() <= options.gradient_tolerance) return params;
    if (it == options.max_iterations) break;

    const Eigen::VectorXd eta = data.features * params.theta;
    Eigen::VectorXd curvature(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double p = sigmoid(eta[i]);
      curvature[i] = w[i] * p * (1.0 - p);
    }
    const Eigen::MatrixXd hessian =
        data.features.transpose() * curvature.asDiagonal() * data.features + ridge;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);

    // Backtracking on the weighted objective; inside the rounding floor the
    // full Newton step is accepted.
    const double f0 = weighted_objective(data, params.theta, w);
    const double slope = grad.dot(step);
    double t = 1.0;
    while (t > 1e-12) {
      const double f1 = weighted_objective(data, params.theta - t * step, w);
      if (f1 <= f0 - 1e-4 * t * slope || std::abs(f1 - f0) <= 1e-14 * (1.0 + std::abs(f0))) break;
      t *= 0.5;
    }
    params.theta -= t * step;
    if (!params.theta.allFinite()) throw LogRegFitError("IRLS produced non-finite parameters", params);
  }
  throw LogRegFitError("IRLS did not reach the gradient tolerance", params);
}

LogRegParams LogisticRegressionModel::weighted_fit(const Data& d, const SampleWeights& w) const {
  try {
    return logreg_fit(d, w, options);
  } catch (const LogRegFitError& e) {
    if (!keep_last_iterate) throw;
    log_warning(std::string("logistic M-step kept its last iterate: ") + e.what());
    return e.last_iterate();
  }
}

}  // namespace rlvi
