#include "rlvi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "rlvi/errors.hpp"

namespace rlvi {

namespace {

void same_shape(Eigen::Index a, Eigen::Index b) {
  if (a != b) throw InvalidInput("estimate and truth differ in size");
}

}  // namespace

double rel_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  same_shape(estimate.size(), truth.size());
  const double scale = truth.norm();
  if (!(scale > 0.0)) throw InvalidInput("relative error against a zero vector");
  return (estimate - truth).norm() / scale;
}

double rel_error_frobenius(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  same_shape(estimate.rows(), truth.rows());
  same_shape(estimate.cols(), truth.cols());
  const double scale = truth.norm();
  if (!(scale > 0.0)) throw InvalidInput("relative error against a zero matrix");
  return (estimate - truth).norm() / scale;
}

double hyperplane_angle(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth, bool has_intercept) {
  same_shape(estimate.size(), truth.size());
  const Eigen::Index k = has_intercept ? estimate.size() - 1 : estimate.size();
  if (k <= 0) throw InvalidInput("no weights left once the intercept is dropped");
  const double na = estimate.head(k).norm();
  const double nb = truth.head(k).norm();
  if (!(na > 0.0 && nb > 0.0)) throw InvalidInput("hyperplane angle of a zero weight vector");
  // 2 atan2(|a - b|, |a + b|) on unit vectors keeps full precision near 0 and 180.
  const Eigen::VectorXd a = estimate.head(k) / na;
  const Eigen::VectorXd b = truth.head(k) / nb;
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm()) * 180.0 / std::numbers::pi;
}

double misalignment(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  same_shape(estimate.size(), truth.size());
  const double na = estimate.norm();
  const double nb = truth.norm();
  if (!(na > 0.0 && nb > 0.0)) throw InvalidInput("misalignment of a zero vector");
  return 1.0 - std::min(1.0, std::abs(estimate.dot(truth)) / (na * nb));
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) throw InvalidInput("matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("correlation needs two equal-length series");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

Quartiles summarize(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }), values.end());
  Quartiles q;
  q.count = values.size();
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    q.mean = q.p25 = q.p50 = q.p75 = q.sd = nan;
    return q;
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.p25 = at(0.25);
  q.p50 = at(0.5);
  q.p75 = at(0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  q.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - q.mean) * (v - q.mean);
    q.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return q;
}

}  // namespace rlvi
