#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "rlvi/models.hpp"

namespace rlvi {

Eigen::VectorXd pca_loss(const PointData& data, const PcaParams& params) {
  const Eigen::Index d = data.cols();
  if (params.theta.size() != d || params.center.size() != d) {
    throw InvalidInput("PCA parameters do not match data dimension");
  }
  if (std::abs(params.theta.norm() - 1.0) > 1e-10) throw InvalidInput("theta must be unit norm");
  if (!(params.sigma2 > 0.0)) throw InvalidInput("sigma2 must be positive");

  const Eigen::MatrixXd centred = data.rowwise() - params.center.transpose();
  const Eigen::VectorXd along = centred * params.theta;
  const Eigen::MatrixXd residual = centred - along * params.theta.transpose();
  const double log_norm =
      0.5 * static_cast<double>(d - 1) * std::log(2.0 * std::numbers::pi * params.sigma2);
  return (residual.rowwise().squaredNorm().array() / (2.0 * params.sigma2) + log_norm).matrix();
}

PcaParams pca_fit(const PointData& data, const SampleWeights& weights) {
  const Eigen::Index d = data.cols();
  if (d < 2) throw InvalidInput("PCA needs at least two dimensions");
  if (weights.size() != data.rows()) throw InvalidInput("weights length differs from sample count");
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidInput("weights sum to zero");

  const Eigen::VectorXd& w = weights.values();
  PcaParams params;
  params.center = data.transpose() * w / total;
  const Eigen::MatrixXd centred = data.rowwise() - params.center.transpose();
  Eigen::MatrixXd cov = centred.transpose() * w.asDiagonal() * centred / total;
  cov = 0.5 * (cov + cov.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw FitError("eigendecomposition failed");
  params.theta = eig.eigenvectors().col(d - 1);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (params.theta[k] != 0.0) {
      if (params.theta[k] < 0.0) params.theta = -params.theta;
      break;
    }
  }
  params.theta.normalize();
  const double residual_power = cov.trace() - eig.eigenvalues()[d - 1];
  params.sigma2 = std::max(residual_power / static_cast<double>(d - 1), kVarianceFloor);
  return params;
}

Eigen::VectorXd pca_weighted_gradient(const PointData& data, const PcaParams& params,
                                      const Eigen::VectorXd& weights) {
  const Eigen::Index d = data.cols();
  const Eigen::VectorXd& t = params.theta;
  const double s2 = params.sigma2;
  const double tt = t.squaredNorm();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 1);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd z = data.row(i).transpose() - params.center;
    const double a = z.dot(t);
    const double r2 = z.squaredNorm() - 2.0 * a * a + a * a * tt;
    // d||z - (z't) t||^2 / dt = -4 a z + 2 a ||t||^2 z + 2 a^2 t
    const Eigen::VectorXd dr2 = (-4.0 * a + 2.0 * a * tt) * z + 2.0 * a * a * t;
    grad.head(d) += weights[i] * dr2 / (2.0 * s2);
    grad[d] += weights[i] * (-r2 / (2.0 * s2 * s2) + 0.5 * static_cast<double>(d - 1) / s2);
  }
  return grad;
}

double PcaModel::param_distance(const Params& a, const Params& b) const {
  return 1.0 - std::abs(a.theta.dot(b.theta));
}

double PcaModel::outlier_log_density(const Data& d) const {
  if (d.rows() == 0 || d.cols() < 2) return 0.0;
  const double range = (d.colwise().maxCoeff() - d.colwise().minCoeff()).maxCoeff();
  if (!(range > 0.0)) return 0.0;
  return -static_cast<double>(d.cols() - 1) * std::log(range);
}

}  // namespace rlvi
