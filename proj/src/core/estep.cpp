#include <algorithm>
#include <cmath>
#include <string>

#include "rlvi/core.hpp"

namespace rlvi {
namespace {

EStepResult make_result(const Eigen::VectorXd& losses, Eigen::VectorXd pi, int iterations,
                        Collapse collapse) {
  EStepResult result;
  result.weights = SampleWeights(std::move(pi));
  result.epsilon_hat = estimate_epsilon(result.weights);
  result.objective = negative_elbo(losses, result.weights);
  result.iterations = iterations;
  result.collapse = collapse;
  result.degenerate = collapse != Collapse::none;
  return result;
}

Collapse classify_mean(double mean) {
  if (mean <= kDegeneracyMargin) return Collapse::all_corrupted;
  if (mean >= 1.0 - kDegeneracyMargin) return Collapse::all_clean;
  return Collapse::none;
}

// sum_i sigmoid(base - l_i + lambda): strictly increasing in lambda.
double shifted_mass(const Eigen::VectorXd& losses, double base, double lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < losses.size(); ++i) total += sigmoid(base - losses[i] + lambda);
  return total;
}

}  // namespace

void FixedPointConfig::validate() const {
  if (max_iterations <= 0) throw InvalidInput("max_iterations must be positive");
  if (!(tolerance > 0.0)) throw InvalidInput("tolerance must be positive");
  if (!(init_mean > 0.0 && init_mean < 1.0)) throw InvalidInput("init_mean must lie in (0, 1)");
}

Eigen::VectorXd fixed_point_sweep(const Eigen::VectorXd& losses, double mean) {
  const double shift = logit(mean);
  Eigen::VectorXd pi(losses.size());
  for (Eigen::Index j = 0; j < losses.size(); ++j) pi[j] = sigmoid(shift - losses[j]);
  return pi;
}

EStepResult fixed_point_estep(const Eigen::VectorXd& losses,
                              const std::optional<SampleWeights>& warm_start,
                              const FixedPointConfig& config) {
  config.validate();
  if (losses.size() == 0) throw InvalidInput("empty loss vector");
  if (!losses.allFinite()) throw InvalidInput("non-finite loss");

  Eigen::VectorXd pi;
  if (warm_start) {
    if (warm_start->size() != losses.size()) throw InvalidInput("warm start length mismatch");
    if (classify_mean(warm_start->mean()) != Collapse::none) {
      throw InvalidInput("warm start mean lies on the degenerate boundary");
    }
    pi = warm_start->values();
  } else {
    pi = Eigen::VectorXd::Constant(losses.size(), config.init_mean);
  }

  double mean = pi.mean();
  for (int it = 1; it <= config.max_iterations; ++it) {
    Eigen::VectorXd next = fixed_point_sweep(losses, mean);
    const double change = (next - pi).cwiseAbs().maxCoeff();
    pi = std::move(next);
    mean = pi.mean();

    const Collapse collapse = classify_mean(mean);
    if (collapse != Collapse::none) return make_result(losses, std::move(pi), it, collapse);
    if (change <= config.tolerance) return make_result(losses, std::move(pi), it, Collapse::none);
  }
  throw EStepConvergenceError(
      "fixed-point E-step did not reach tolerance in " + std::to_string(config.max_iterations) +
          " sweeps",
      make_result(losses, std::move(pi), config.max_iterations, Collapse::none));
}

EStepResult constrained_estep(const Eigen::VectorXd& losses, double n0,
                              const FixedPointConfig& config,
                              const std::optional<SampleWeights>& warm_start) {
  const auto n = static_cast<double>(losses.size());
  if (!(n0 > 0.0 && n0 < n)) throw InvalidInput("constraint level n0 must lie in (0, n)");

  EStepResult unconstrained;
  try {
    unconstrained = fixed_point_estep(losses, warm_start, config);
  } catch (const EStepConvergenceError& e) {
    // The active branch does not depend on the unconstrained iterate.
    if (e.last_iterate().weights.sum() >= n0) throw;
    unconstrained = e.last_iterate();
  }
  if (unconstrained.weights.sum() >= n0) {
    unconstrained.dual_lambda = 0.0;
    return unconstrained;
  }

  const double base = std::log(n0) - std::log(n - n0);
  const double tol = 1e-9 * n;

  double lo = 0.0;
  double lambda = 0.0;
  int steps = 0;
  if (shifted_mass(losses, base, lo) < n0) {
    double hi = std::max(1.0, losses.maxCoeff() + std::abs(base) + 1.0);
    int doublings = 0;
    while (shifted_mass(losses, base, hi) < n0) {
      if (++doublings > 200) throw SolverError("could not bracket the dual variable");
      lo = hi;
      hi *= 2.0;
    }
    lambda = hi;
    for (; steps < 2000; ++steps) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;  // bracket exhausted at double precision
      const double mass = shifted_mass(losses, base, mid);
      lambda = mid;
      if (std::abs(mass - n0) <= tol) break;
      if (mass < n0) lo = mid; else hi = mid;
    }
  }

  Eigen::VectorXd pi(losses.size());
  for (Eigen::Index i = 0; i < losses.size(); ++i) pi[i] = sigmoid(base - losses[i] + lambda);
  EStepResult result = make_result(losses, std::move(pi), unconstrained.iterations + steps,
                                   Collapse::none);
  result.dual_lambda = lambda;
  return result;
}

}  // namespace rlvi
