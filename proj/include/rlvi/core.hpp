#pragma once

// Variational E-step machinery: the negative ELBO over per-sample Bernoulli
// probabilities, its fixed-point minimiser, the budget-constrained variant,
// and threshold-based truncation.
//
// Every function here is pure and safe to call concurrently.

#include <optional>

#include <Eigen/Core>

#include "rlvi/errors.hpp"
#include "rlvi/weights.hpp"

namespace rlvi {

/// The mean of pi is kept inside (kDegeneracyMargin, 1 - kDegeneracyMargin);
/// leaving that band marks the E-step as collapsed.
inline constexpr double kDegeneracyMargin = 1e-6;

struct FixedPointConfig {
  int max_iterations = 1000;
  double tolerance = 1e-10;  // sup-norm change of pi between sweeps
  double init_mean = 0.9;    // uniform start when no warm start is given

  void validate() const;
};

enum class Collapse { none, all_clean, all_corrupted };

struct EStepResult {
  SampleWeights weights;
  double epsilon_hat = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool degenerate = false;
  Collapse collapse = Collapse::none;
  std::optional<double> dual_lambda;  // set only by constrained_estep
};

/// Thrown when the sweep budget runs out. Carries the last iterate, which is
/// still a descent point for the objective.
class EStepConvergenceError : public Error {
 public:
  EStepConvergenceError(const std::string& what, EStepResult last)
      : Error(what), last_(std::move(last)) {}
  const EStepResult& last_iterate() const noexcept { return last_; }

 private:
  EStepResult last_;
};

// Numerically stable logistic function and its inverse.
double sigmoid(double x) noexcept;
double logit(double p) noexcept;

/// sum_i pi_i l_i + KL of Bernoulli(pi_i) against Bernoulli(<pi>), with
/// 0 ln 0 = 0.
double negative_elbo(const Eigen::VectorXd& losses, const SampleWeights& weights);

/// KL[r(t|pi) || p(t|eps)] for the factorised Bernoulli family, 0 < eps < 1.
double kl_bernoulli(const SampleWeights& weights, double epsilon);

/// 1 - mean(pi), clamped to [0, 1].
double estimate_epsilon(const SampleWeights& weights);

/// One sweep of the stationarity map at a frozen mean:
/// pi_j = sigmoid(logit(mean) - l_j).
Eigen::VectorXd fixed_point_sweep(const Eigen::VectorXd& losses, double mean);

/// Repeated sweeps of `fixed_point_sweep`, refreshing the mean after each full
/// sweep, until the sup-norm change drops below `config.tolerance`.
///
/// Stops early with `degenerate` set when the mean leaves
/// (kDegeneracyMargin, 1 - kDegeneracyMargin). Throws EStepConvergenceError
/// when the budget is exhausted, InvalidInput on non-finite losses or a warm
/// start of the wrong length or with a boundary mean.
EStepResult fixed_point_estep(const Eigen::VectorXd& losses,
                              const std::optional<SampleWeights>& warm_start,
                              const FixedPointConfig& config = {});

/// sup_j |pi_j - sigmoid(logit(<pi>) - l_j)|.
double stationarity_residual(const Eigen::VectorXd& losses, const SampleWeights& weights);

/// Smallest threshold tau among the distinct pi values such that the expected
/// share of corrupted mass kept by pi >= tau is at most `bound`. Returns 0
/// when no corrupted mass exists and max(pi) + 1e-12 when no candidate is
/// feasible.
double select_tau(const SampleWeights& weights, double bound = 0.05);

/// Entries strictly below tau become exactly 0.
SampleWeights truncate(const SampleWeights& weights, double tau);

/// E-step subject to sum(pi) >= n0. Runs the unconstrained solver first; if the
/// constraint binds, finds the dual variable lambda > 0 by bisection so that
/// sum_i sigmoid(logit(n0/n) - l_i + lambda) = n0 within 1e-9 n.
EStepResult constrained_estep(const Eigen::VectorXd& losses, double n0,
                              const FixedPointConfig& config = {},
                              const std::optional<SampleWeights>& warm_start = std::nullopt);

}  // namespace rlvi
