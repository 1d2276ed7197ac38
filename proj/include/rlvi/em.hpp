#pragma once

// Block EM for robust maximum likelihood: alternate the variational E-step
// over per-sample clean probabilities with a weighted M-step of the model.

#include <optional>
#include <utility>
#include <vector>

#include "rlvi/core.hpp"
#include "rlvi/models.hpp"

namespace rlvi {

struct EmConfig {
  double param_tolerance = 1e-8;
  int max_outer_iterations = 100;
  FixedPointConfig estep;
  // When set, every E-step enforces sum(pi) >= min_clean_mass.
  std::optional<double> min_clean_mass;
};

struct EmIteration {
  double objective = 0.0;  // negative ELBO at (theta^k, pi^k)
  double epsilon_hat = 0.0;
  double param_distance = 0.0;
  bool estep_converged = true;
};

struct EmTrace {
  std::vector<EmIteration> iterations;
  EStepResult final_estep;
};

template <typename Params>
struct EmResult {
  Params params;
  EmTrace trace;
  bool converged = false;
  // The E-step collapsed onto the all-clean boundary; params are the ML fit.
  bool all_clean = false;
};

/// Plain maximum likelihood: the weighted fit with unit weights.
template <RobustModel M>
typename M::Params ml_fit(const M& model, const typename M::Data& data) {
  return model.weighted_fit(data, SampleWeights::ones(model.sample_count(data)));
}

namespace detail {

inline EStepResult run_estep(const Eigen::VectorXd& losses,
                             const std::optional<SampleWeights>& warm_start,
                             const EmConfig& config, bool& converged) {
  converged = true;
  try {
    if (config.min_clean_mass) {
      return constrained_estep(losses, *config.min_clean_mass, config.estep, warm_start);
    }
    return fixed_point_estep(losses, warm_start, config.estep);
  } catch (const EStepConvergenceError& e) {
    converged = false;
    return e.last_iterate();
  }
}

}  // namespace detail

/// Robust EM. Starts from the ML fit, then repeats: losses at the current
/// parameters (measured against the model's outlier density), E-step warm
/// started from the previous pi, weighted M-step; stops when the parameter
/// distance falls to `param_tolerance`.
///
/// An all-clean E-step collapse returns the ML fit with unit weights. An
/// all-corrupted collapse throws DegenerateError. Running out of outer
/// iterations returns the last estimate with `converged == false`.
template <RobustModel M>
EmResult<typename M::Params> rlvi_em(const M& model, const typename M::Data& data,
                                     const EmConfig& config = {}) {
  const Eigen::Index n = model.sample_count(data);
  if (n < 2) throw InvalidInput("robust EM needs at least two samples");
  if (!(config.param_tolerance > 0.0)) throw InvalidInput("param_tolerance must be positive");
  if (config.max_outer_iterations <= 0) throw InvalidInput("max_outer_iterations must be positive");

  const double log_q = model.outlier_log_density(data);
  auto estep_losses = [&](const typename M::Params& p) -> Eigen::VectorXd {
    return (model.per_sample_loss(data, p).array() + log_q).matrix();
  };

  EmResult<typename M::Params> result{ml_fit(model, data), {}, false, false};
  Eigen::VectorXd losses = estep_losses(result.params);
  std::optional<SampleWeights> warm;

  for (int k = 1; k <= config.max_outer_iterations; ++k) {
    bool estep_converged = true;
    EStepResult estep = detail::run_estep(losses, warm, config, estep_converged);

    if (estep.collapse == Collapse::all_corrupted) {
      throw DegenerateError("E-step collapsed: every sample judged corrupted");
    }
    if (estep.collapse == Collapse::all_clean) {
      SampleWeights ones = SampleWeights::ones(n);
      result.params = ml_fit(model, data);
      losses = estep_losses(result.params);
      estep.weights = ones;
      estep.epsilon_hat = estimate_epsilon(ones);
      estep.objective = negative_elbo(losses, ones);
      result.trace.iterations.push_back({estep.objective, estep.epsilon_hat, 0.0, estep_converged});
      result.trace.final_estep = std::move(estep);
      result.converged = true;
      result.all_clean = true;
      return result;
    }

    typename M::Params next = model.weighted_fit(data, estep.weights);
    const double distance = model.param_distance(next, result.params);
    result.params = std::move(next);
    losses = estep_losses(result.params);

    EmIteration record;
    record.objective = negative_elbo(losses, estep.weights);
    record.epsilon_hat = estep.epsilon_hat;
    record.param_distance = distance;
    record.estep_converged = estep_converged;
    result.trace.iterations.push_back(record);

    warm = estep.weights;
    result.trace.final_estep = std::move(estep);
    if (distance <= config.param_tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace rlvi
