#include "rlvi/weights.hpp"

#include <cmath>

#include "rlvi/errors.hpp"

namespace rlvi {

SampleWeights::SampleWeights(Eigen::VectorXd values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidInput("sample weight " + std::to_string(i) + " outside [0, 1]");
    }
  }
}

SampleWeights SampleWeights::constant(Eigen::Index n, double value) {
  return SampleWeights(Eigen::VectorXd::Constant(n, value));
}

double SampleWeights::mean() const {
  if (values_.size() == 0) throw InvalidInput("mean of empty weights");
  return values_.mean();
}

}  // namespace rlvi
