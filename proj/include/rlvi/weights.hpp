#pragma once

#include <Eigen/Core>

namespace rlvi {

/// Per-sample Bernoulli probabilities of being clean. Entries lie in [0, 1];
/// the E-step produces interior values, `truncate` may set exact zeros.
class SampleWeights {
 public:
  SampleWeights() = default;
  explicit SampleWeights(Eigen::VectorXd values);

  static SampleWeights constant(Eigen::Index n, double value);
  static SampleWeights ones(Eigen::Index n) { return constant(n, 1.0); }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.size() == 0; }
  double operator[](Eigen::Index i) const { return values_[i]; }

  double sum() const { return values_.sum(); }
  double mean() const;

 private:
  Eigen::VectorXd values_;
};

}  // namespace rlvi
