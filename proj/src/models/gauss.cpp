#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "rlvi/models.hpp"

namespace rlvi {

Eigen::VectorXd gauss_loss(const PointData& data, const GaussParams& params) {
  const Eigen::Index d = data.cols();
  if (params.mu.size() != d || params.sigma.rows() != d || params.sigma.cols() != d) {
    throw InvalidInput("Gaussian parameters do not match data dimension");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(params.sigma, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 1e-12)) {
    throw InvalidInput("covariance is not positive definite");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(params.sigma);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double constant = log_det + static_cast<double>(d) * std::log(2.0 * std::numbers::pi);

  const Eigen::MatrixXd centred = (data.rowwise() - params.mu.transpose()).transpose();
  const Eigen::MatrixXd whitened = llt.matrixL().solve(centred);
  return (0.5 * (whitened.colwise().squaredNorm().array() + constant)).matrix().transpose();
}

GaussParams gauss_fit(const PointData& data, const SampleWeights& weights) {
  if (weights.size() != data.rows()) throw InvalidInput("weights length differs from sample count");
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidInput("weights sum to zero");
  const Eigen::VectorXd& w = weights.values();

  GaussParams params;
  params.mu = data.transpose() * w / total;
  const Eigen::MatrixXd centred = data.rowwise() - params.mu.transpose();
  const Eigen::MatrixXd cov = centred.transpose() * w.asDiagonal() * centred / total;
  params.sigma = 0.5 * (cov + cov.transpose());
  return params;
}

Eigen::VectorXd gauss_weighted_gradient(const PointData& data, const GaussParams& params,
                                        const Eigen::VectorXd& weights) {
  const Eigen::Index d = data.cols();
  const Eigen::MatrixXd inv = params.sigma.inverse();
  Eigen::VectorXd grad_mu = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd grad_sigma = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd v = inv * (data.row(i).transpose() - params.mu);
    grad_mu -= weights[i] * v;
    grad_sigma += 0.5 * weights[i] * (inv - v * v.transpose());
  }
  Eigen::VectorXd grad(d + d * d);
  grad.head(d) = grad_mu;
  grad.tail(d * d) = Eigen::Map<const Eigen::VectorXd>(grad_sigma.data(), d * d);
  return grad;
}

double GaussianModel::param_distance(const Params& a, const Params& b) const {
  return std::sqrt((a.mu - b.mu).squaredNorm() + (a.sigma - b.sigma).squaredNorm());
}

}  // namespace rlvi
