#pragma once

// Weighted objectives of the four model families written from their dense
// formulas, independent of the library's loss code. Parameter vectors are
// flattened the same way the analytic gradients are.

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "rlvi/models.hpp"

namespace oracle {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double softplus_ref(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

inline double linreg_objective(const rlvi::LabeledData& d, const Eigen::VectorXd& w, const Eigen::VectorXd& p) {
  const Eigen::Index k = d.dim();
  double total = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double r = d.targets[i] - d.features.row(i).dot(p.head(k));
    total += w[i] * (r * r / (2 * p[k]) + 0.5 * std::log(kTwoPi * p[k]));
  }
  return total;
}

inline double logreg_objective(const rlvi::LabeledData& d, const Eigen::VectorXd& w, const Eigen::VectorXd& t) {
  double total = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double eta = d.features.row(i).dot(t);
    total += w[i] * (d.targets[i] == 1.0 ? softplus_ref(-eta) : softplus_ref(eta));
  }
  return total;
}

inline double pca_objective(const rlvi::PointData& z, const Eigen::VectorXd& center, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& p) {
  const Eigen::Index d = z.cols();
  const Eigen::VectorXd t = p.head(d);
  const double s2 = p[d];
  double total = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Eigen::VectorXd x = z.row(i).transpose() - center;
    const Eigen::VectorXd r = x - x.dot(t) * t;
    total += w[i] * (r.squaredNorm() / (2 * s2) + 0.5 * (d - 1) * std::log(kTwoPi * s2));
  }
  return total;
}

inline double gauss_objective(const rlvi::PointData& z, const Eigen::VectorXd& w, const Eigen::VectorXd& p) {
  const Eigen::Index d = z.cols();
  const Eigen::VectorXd mu = p.head(d);
  const Eigen::MatrixXd s = Eigen::Map<const Eigen::MatrixXd>(p.data() + d, d, d);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
  const Eigen::MatrixXd inv = lu.inverse();
  const double logdet = std::log(lu.determinant());
  double total = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Eigen::VectorXd x = z.row(i).transpose() - mu;
    total += w[i] * 0.5 * (x.dot(inv * x) + logdet + d * std::log(kTwoPi));
  }
  return total;
}

}  // namespace oracle
