#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rlvi/models.hpp"

namespace rlvi {

/// true marks a sample the generator corrupted.
using CorruptionMask = std::vector<bool>;

/// Multiclass samples with integer labels in [0, classes).
struct ClassificationSet {
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;
  int classes = 0;
  CorruptionMask corrupted;  // empty when unknown

  Eigen::Index size() const noexcept { return features.rows(); }
};

/// One arrival of the online protocol: a training half (possibly with flipped
/// labels) and an untouched evaluation half.
struct BatchPair {
  LabeledData train;
  LabeledData test;
  double epsilon_drawn = 0.0;   // corruption level sampled for this batch
  double flip_fraction = 0.0;   // flipped labels / train size
  CorruptionMask train_corrupted;
};

class BatchSource {
 public:
  virtual ~BatchSource() = default;
  /// Next batch pair, or nullopt once the stream is exhausted.
  virtual std::optional<BatchPair> next() = 0;
};

}  // namespace rlvi
