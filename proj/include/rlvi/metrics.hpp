#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace rlvi {

/// ||estimate - truth|| / ||truth||.
double rel_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

/// Matrix analogue of rel_error in the Frobenius norm.
double rel_error_frobenius(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

/// Angle in degrees, in [0, 180], between the weight vectors with the trailing
/// intercept entry dropped when `has_intercept`. Orientation matters: flipping
/// the hyperplane's sign gives 180 - angle.
double hyperplane_angle(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth, bool has_intercept = true);

/// 1 - |cos| between two directions; sign-invariant.
double misalignment(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Sample Pearson correlation; NaN when either side has zero variance.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

struct Quartiles {
  std::size_t count = 0;
  double mean = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double sd = 0.0;  // sample standard deviation (0 for a single value)
};

/// Percentiles by linear interpolation between order statistics. NaNs are
/// skipped; an empty input yields count 0 and NaN statistics.
Quartiles summarize(std::vector<double> values);

}  // namespace rlvi
