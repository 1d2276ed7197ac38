#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "rlvi/models.hpp"

namespace rlvi {
namespace {

void check_shapes(const LabeledData& data) {
  if (data.features.rows() != data.targets.size()) {
    throw InvalidInput("feature rows and target count differ");
  }
}

}  // namespace

double uniform_box_log_density(const Eigen::MatrixXd& columns) {
  double log_density = 0.0;
  if (columns.rows() == 0) return log_density;
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    const double range = columns.col(k).maxCoeff() - columns.col(k).minCoeff();
    if (range > 0.0) log_density -= std::log(range);
  }
  return log_density;
}

Eigen::VectorXd linreg_loss(const LabeledData& data, const LinRegParams& params) {
  check_shapes(data);
  if (params.theta.size() != data.dim()) throw InvalidInput("theta length differs from feature count");
  if (!(params.sigma2 > 0.0)) throw InvalidInput("sigma2 must be positive");
  const Eigen::VectorXd residual = data.targets - data.features * params.theta;
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * params.sigma2);
  return (residual.array().square() / (2.0 * params.sigma2) + log_norm).matrix();
}

LinRegParams wls_fit(const LabeledData& data, const SampleWeights& weights) {
  check_shapes(data);
  if (weights.size() != data.size()) throw InvalidInput("weights length differs from sample count");
  const Eigen::Index d = data.dim();
  if (!(weights.sum() > static_cast<double>(d))) {
    throw SingularFit("effective sample weight does not exceed the parameter count");
  }

  // Zero-weight rows are dropped so they cannot influence the factorisation.
  std::vector<Eigen::Index> rows;
  rows.reserve(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (weights[i] > 0.0) rows.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(m, d);
  Eigen::VectorXd b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double s = std::sqrt(weights[rows[r]]);
    a.row(r) = s * data.features.row(rows[r]);
    b[r] = s * data.targets[rows[r]];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < d) throw SingularFit("weighted design matrix is rank deficient");

  LinRegParams params;
  params.theta = qr.solve(b);
  const Eigen::VectorXd residual = data.targets - data.features * params.theta;
  const double rss = weights.values().dot(residual.array().square().matrix());
  params.sigma2 = std::max(rss / weights.sum(), kVarianceFloor);
  return params;
}

Eigen::VectorXd linreg_weighted_gradient(const LabeledData& data, const LinRegParams& params,
                                         const Eigen::VectorXd& weights) {
  check_shapes(data);
  const Eigen::VectorXd residual = data.targets - data.features * params.theta;
  const double s2 = params.sigma2;
  Eigen::VectorXd grad(data.dim() + 1);
  grad.head(data.dim()) = -data.features.transpose() * (weights.cwiseProduct(residual)) / s2;
  grad[data.dim()] =
      weights.dot((-residual.array().square() / (2.0 * s2 * s2) + 1.0 / (2.0 * s2)).matrix());
  return grad;
}

LinRegParams LinearRegressionModel::weighted_fit(const Data& d, const SampleWeights& w) const {
  const double top = w.size() > 0 ? w.values().maxCoeff() : 0.0;
  if (w.sum() > static_cast<double>(d.dim()) || !(top > 0.0)) return wls_fit(d, w);
  return wls_fit(d, SampleWeights(w.values() / top));
}

double LinearRegressionModel::param_distance(const Params& a, const Params& b) const {
  const double dt = (a.theta - b.theta).squaredNorm();
  const double ds = a.sigma2 - b.sigma2;
  return std::sqrt(dt + ds * ds);
}

}  // namespace rlvi
