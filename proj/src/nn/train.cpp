#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rlvi/log.hpp"
#include "rlvi/nn.hpp"

namespace rlvi {

void TrainConfig::validate() const {
  if (hidden <= 0) throw InvalidInput("hidden width must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidInput("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidInput("momentum must lie in [0, 1)");
  if (batch_size <= 0) throw InvalidInput("batch size must be positive");
  if (epochs <= 0) throw InvalidInput("epoch count must be positive");
  if (!(type2_bound > 0.0 && type2_bound < 1.0)) throw InvalidInput("type-II bound must lie in (0, 1)");
  estep.validate();
}

namespace {

void check_set(const ClassificationSet& set, const Mlp& mlp, const char* name) {
  if (set.size() == 0) throw InvalidInput(std::string(name) + " set is empty");
  if (set.features.cols() != mlp.input_dim() || set.labels.size() != set.size()) {
    throw InvalidInput(std::string(name) + " set does not match the network");
  }
  if (set.labels.minCoeff() < 0 || set.labels.maxCoeff() >= mlp.classes()) {
    throw InvalidInput(std::string(name) + " set has labels outside the class range");
  }
}

bool interior_mean(const SampleWeights& w) {
  const double m = w.mean();
  return m > kDegeneracyMargin && m < 1.0 - kDegeneracyMargin;
}

SampleWeights rescale_to_max(const SampleWeights& w) {
  const double top = w.values().maxCoeff();
  if (!(top > 0.0)) return w;
  return SampleWeights((w.values() / top).cwiseMin(1.0));
}

void add_scaled(Mlp& target, const Mlp& delta, double scale) {
  target.w1 += scale * delta.w1;
  target.b1 += scale * delta.b1;
  target.w2 += scale * delta.w2;
  target.b2 += scale * delta.b2;
}

void scale_in_place(Mlp& m, double scale) {
  m.w1 *= scale;
  m.b1 *= scale;
  m.w2 *= scale;
  m.b2 *= scale;
}

}  // namespace

TrainResult train_rlvi(Mlp mlp, const ClassificationSet& train, const ClassificationSet& validation,
                       const TrainConfig& config, const ClassificationSet* test) {
  config.validate();
  check_set(train, mlp, "training");
  check_set(validation, mlp, "validation");
  if (test) check_set(*test, mlp, "test");
  const Eigen::Index n = train.size();
  const bool have_mask = train.corrupted.size() == static_cast<std::size_t>(n);
  const double log_classes = std::log(static_cast<double>(mlp.classes()));

  TrainResult result{std::move(mlp), {}, {}};
  Mlp& net = result.model;
  TrainState& state = result.state;
  state.pi = SampleWeights::ones(n);
  state.estep_pi = state.pi;
  state.loss_buffer = Eigen::VectorXd::Zero(n);

  Mlp velocity(net.input_dim(), net.hidden(), net.classes());
  const CounterRng base(config.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    CounterRng shuffle_rng = base.split(static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const Eigen::Index b = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd xb(b, train.features.cols());
      Eigen::VectorXi yb(b);
      Eigen::VectorXd wb(b);
      for (Eigen::Index k = 0; k < b; ++k) {
        const Eigen::Index i = order[start + static_cast<std::size_t>(k)];
        xb.row(k) = train.features.row(i);
        yb[k] = train.labels[i];
        wb[k] = state.pi[i];
      }
      ForwardBackward fb = forward_backward(net, xb, yb, wb);
      for (Eigen::Index k = 0; k < b; ++k) state.loss_buffer[order[start + static_cast<std::size_t>(k)]] = fb.losses[k];
      scale_in_place(velocity, config.momentum);
      add_scaled(velocity, fb.gradient, -config.learning_rate / static_cast<double>(b));
      add_scaled(net, velocity, 1.0);
      if (!net.all_finite()) throw SolverError("parameters became non-finite at epoch " + std::to_string(epoch));
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = state.loss_buffer.mean();
    metrics.val_accuracy = accuracy(net, validation);
    if (test) metrics.test_accuracy = accuracy(net, *test);
    state.val_acc_history.push_back(metrics.val_accuracy);

    double threshold = 0.0;
    if (config.robust) {
      const Eigen::VectorXd losses = (state.loss_buffer.array() - log_classes).matrix();
      std::optional<SampleWeights> warm;
      if (interior_mean(state.estep_pi)) warm = state.estep_pi;
      EStepResult estep;
      try {
        estep = fixed_point_estep(losses, warm, config.estep);
      } catch (const EStepConvergenceError& e) {
        estep = e.last_iterate();
        metrics.estep_converged = false;
      }

      if (estep.collapse == Collapse::all_corrupted) {
        log_warning("epoch E-step collapsed to all-corrupted; keeping previous weights");
      } else {
        state.estep_pi = estep.collapse == Collapse::all_clean ? SampleWeights::ones(n) : estep.weights;
        SampleWeights weights = config.normalize_weights ? rescale_to_max(state.estep_pi) : state.estep_pi;
        const double tau_star = select_tau(weights, config.type2_bound);
        if (state.overfit) {
          if (config.truncation) {
            state.tau = std::max(state.tau, tau_star);
            weights = truncate(weights, state.tau);
          }
        } else {
          state.overfit = detect_overfit(state.val_acc_history);
        }
        state.pi = std::move(weights);
        threshold = config.truncation ? state.tau : tau_star;
      }
      metrics.epsilon_hat = estimate_epsilon(state.estep_pi);
    }
    metrics.tau = state.tau;
    metrics.overfit = state.overfit;

    if (have_mask) {
      Eigen::Index corrupted = 0, caught = 0, clean = 0, dropped = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool below = state.pi[i] < threshold;
        if (train.corrupted[static_cast<std::size_t>(i)]) {
          ++corrupted;
          caught += below;
        } else {
          ++clean;
          dropped += below;
        }
      }
      metrics.corrupted_identified = corrupted ? static_cast<double>(caught) / corrupted : 0.0;
      metrics.clean_truncated = clean ? static_cast<double>(dropped) / clean : 0.0;
    }
    result.epochs.push_back(metrics);
  }
  return result;
}

}  // namespace rlvi
