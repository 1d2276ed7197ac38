#include <algorithm>
#include <vector>

#include "rlvi/core.hpp"

namespace rlvi {

double select_tau(const SampleWeights& weights, double bound) {
  if (!(bound > 0.0 && bound < 1.0)) throw InvalidInput("type II bound must lie in (0, 1)");
  if (weights.empty()) throw InvalidInput("empty weights");

  std::vector<double> sorted(weights.values().begin(), weights.values().end());
  std::sort(sorted.begin(), sorted.end());

  // suffix[i] = sum over k >= i of (1 - sorted[k]): corrupted mass kept by tau = sorted[i].
  std::vector<double> suffix(sorted.size() + 1, 0.0);
  for (std::size_t i = sorted.size(); i-- > 0;) suffix[i] = suffix[i + 1] + (1.0 - sorted[i]);
  const double total = suffix.front();
  if (total <= 0.0) return 0.0;

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    if (suffix[i] / total <= bound) return sorted[i];
  }
  return sorted.back() + 1e-12;
}

SampleWeights truncate(const SampleWeights& weights, double tau) {
  if (tau < 0.0) throw InvalidInput("truncation threshold must be nonnegative");
  Eigen::VectorXd out = weights.values();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < tau) out[i] = 0.0;
  }
  return SampleWeights(std::move(out));
}

}  // namespace rlvi
