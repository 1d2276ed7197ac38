#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rlvi/bench.hpp"

namespace rlvi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TaskInfo {
  Task task;
  std::string_view name;
};

constexpr TaskInfo kTasks[] = {
    {Task::linreg, "linreg"}, {Task::logreg, "logreg"}, {Task::pca, "pca"},
    {Task::cov, "cov"},       {Task::online, "online"}, {Task::nn, "nn"},
    {Task::estep_bench, "estep-bench"},
};

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) { return CounterRng(seed).split(stream).key(); }

}  // namespace

std::string_view task_name(Task task) {
  for (const auto& t : kTasks)
    if (t.task == task) return t.name;
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (const auto& t : kTasks)
    if (t.name == name) return t.task;
  throw InvalidInput("unknown task '" + std::string(name) + "'");
}

std::string_view method_name(Method method) { return method == Method::ml ? "ml" : "rlvi"; }

Method parse_method(std::string_view name) {
  if (name == "ml") return Method::ml;
  if (name == "rlvi") return Method::rlvi;
  throw InvalidInput("unknown method '" + std::string(name) + "' (expected ml or rlvi)");
}

TaskConfig default_task_config(Task task) {
  TaskConfig c;
  c.task = task;
  switch (task) {
    case Task::linreg:
      c.n = 40, c.d = 10, c.epsilon = 0.2;
      break;
    case Task::logreg:
      c.n = 100, c.d = 3, c.epsilon = 0.05;
      break;
    case Task::pca:
      c.n = 40, c.d = 2, c.epsilon = 0.2;
      break;
    case Task::cov:
      c.n = 50, c.d = 2, c.epsilon = 0.2, c.n0 = 35.0;
      break;
    case Task::online:
      c.d = c.stream.dim;
      c.epsilon = c.pert.mean();
      break;
    case Task::nn:
      c.n = 3000, c.d = 10, c.epsilon = 0.4;
      break;
    case Task::estep_bench:
      c.n = 1000, c.d = 1, c.epsilon = 0.2;
      break;
  }
  return c;
}

void TaskConfig::validate() const {
  if (n < 2) throw InvalidInput("n must be at least 2");
  if (d < 1) throw InvalidInput("d must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in [0, 1)");
  if (task == Task::cov && !(n0 > 0.0 && n0 < n)) throw InvalidInput("n0 must lie in (0, n)");
  if (task == Task::online) {
    if (n_batches < 1) throw InvalidInput("batch count must be positive");
    if (recall_window == 0) throw InvalidInput("recall window must be positive");
    pert.validate();
    sgd.validate();
  }
  if (task == Task::nn) {
    if (classes < 2) throw InvalidInput("need at least two classes");
    if (test_n < 1) throw InvalidInput("test size must be positive");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw InvalidInput("validation fraction must lie in (0, 1)");
    train.validate();
  }
  em.estep.validate();
}

std::vector<std::string> metric_columns(Task task) {
  switch (task) {
    case Task::linreg: return {"rel_error"};
    case Task::logreg: return {"angle_deg"};
    case Task::pca: return {"misalignment"};
    case Task::cov: return {"rel_error", "min_eig"};
    case Task::online: return {"recall_tail", "accuracy_tail", "eps_corr"};
    case Task::nn: return {"test_acc", "corrupted_identified", "clean_truncated", "tau"};
    case Task::estep_bench: return {"objective", "residual", "eps_abs_err"};
  }
  return {};
}

std::string csv_header(Task task) {
  std::string h = "trial,seed,method,epsilon_true,epsilon_hat,converged,iters";
  for (const auto& c : metric_columns(task)) h += "," + c;
  return h + ",status,wall_ms";
}

namespace {

template <typename Params>
void fill_em(TrialRow& row, const EmResult<Params>& r) {
  row.epsilon_hat = r.trace.final_estep.epsilon_hat;
  row.converged = r.converged;
  row.iters = static_cast<int>(r.trace.iterations.size());
}

void ml_row(TrialRow& row) {
  row.epsilon_hat = 0.0;
  row.converged = true;
  row.iters = 1;
}

void linreg_trial(const TaskConfig& c, TrialRow& row) {
  const auto ds = gen_linreg(c.n, c.d, c.epsilon, row.seed, c.linreg);
  const LinearRegressionModel model;
  if (row.method == Method::ml) {
    ml_row(row);
    row.metrics = {rel_error(ml_fit(model, ds.data).theta, ds.theta_star)};
  } else {
    const auto r = rlvi_em(model, ds.data, c.em);
    fill_em(row, r);
    row.metrics = {rel_error(r.params.theta, ds.theta_star)};
  }
}

void logreg_trial(const TaskConfig& c, TrialRow& row) {
  const auto ds = gen_logreg(c.n, c.d, c.epsilon, row.seed, c.logreg);
  const LogisticRegressionModel model;
  if (row.method == Method::ml) {
    ml_row(row);
    row.metrics = {hyperplane_angle(ml_fit(model, ds.data).theta, ds.theta_star)};
  } else {
    const auto r = rlvi_em(model, ds.data, c.em);
    fill_em(row, r);
    row.metrics = {hyperplane_angle(r.params.theta, ds.theta_star)};
  }
}

void pca_trial(const TaskConfig& c, TrialRow& row) {
  const auto ds = gen_pca(c.n, c.d, c.epsilon, row.seed, c.pca);
  const PcaModel model;
  if (row.method == Method::ml) {
    ml_row(row);
    row.metrics = {misalignment(ml_fit(model, ds.data).theta, ds.theta_star)};
  } else {
    const auto r = rlvi_em(model, ds.data, c.em);
    fill_em(row, r);
    row.metrics = {misalignment(r.params.theta, ds.theta_star)};
  }
}

void cov_trial(const TaskConfig& c, TrialRow& row) {
  const auto ds = gen_gauss(c.n, c.d, c.epsilon, row.seed, c.gauss);
  const GaussianModel model;
  GaussParams p;
  if (row.method == Method::ml) {
    ml_row(row);
    p = ml_fit(model, ds.data);
  } else {
    EmConfig em = c.em;
    em.min_clean_mass = c.n0;
    const auto r = rlvi_em(model, ds.data, em);
    fill_em(row, r);
    p = r.params;
  }
  row.metrics = {rel_error_frobenius(p.sigma, ds.sigma_star), min_eigenvalue(p.sigma)};
}

void online_trial(const TaskConfig& c, TrialRow& row) {
  const OnlineMetrics m = run_online_trial(c, row.seed);
  const bool robust = row.method == Method::rlvi;
  const auto& records = robust ? m.rlvi : m.plain;
  std::vector<double> recall, acc, eps_true, eps_hat;
  for (const auto& r : records) {
    recall.push_back(r.recall);
    acc.push_back(r.accuracy);
    eps_true.push_back(r.epsilon_true);
    eps_hat.push_back(r.epsilon_hat);
  }
  row.epsilon_true = summarize(eps_true).mean;
  row.epsilon_hat = robust ? summarize(eps_hat).mean : 0.0;
  row.converged = !robust || m.estep_failures == 0;
  row.iters = static_cast<int>(records.size());
  row.metrics = {tail_mean(recall, c.recall_window), tail_mean(acc, c.recall_window),
                 robust && records.size() >= 2 ? correlation(eps_hat, eps_true) : kNaN};
}

void nn_trial(const TaskConfig& c, TrialRow& row) {
  const BlobModel blobs = make_blob_model(c.d, c.classes, sub_seed(row.seed, 0), c.blobs);
  CounterRng pool_rng(sub_seed(row.seed, 1));
  ClassificationSet pool = sample_blobs(blobs, c.n, pool_rng);
  const LabelFlip flipped = flip_labels(pool.labels, c.classes, c.noise, c.epsilon, sub_seed(row.seed, 2));

  const auto n_val = static_cast<Eigen::Index>(std::floor(c.val_fraction * c.n));
  if (n_val < 1 || n_val >= c.n) throw InvalidInput("validation split leaves an empty side");
  const Eigen::Index n_train = c.n - n_val;
  ClassificationSet val{pool.features.topRows(n_val), flipped.labels.head(n_val), c.classes, {}};
  ClassificationSet train{pool.features.bottomRows(n_train), flipped.labels.tail(n_train), c.classes,
                          CorruptionMask(flipped.corrupted.begin() + n_val, flipped.corrupted.end())};
  CounterRng test_rng(sub_seed(row.seed, 3));
  const ClassificationSet test = sample_blobs(blobs, c.test_n, test_rng);

  CounterRng init_rng(sub_seed(row.seed, 4));
  Mlp net = Mlp::random(c.d, c.train.hidden, c.classes, init_rng);
  TrainConfig tc = c.train;
  tc.robust = row.method == Method::rlvi;
  tc.seed = sub_seed(row.seed, 5);
  const TrainResult r = train_rlvi(std::move(net), train, val, tc, &test);

  const EpochMetrics& last = r.epochs.back();
  row.epsilon_hat = last.epsilon_hat;
  row.iters = static_cast<int>(r.epochs.size());
  row.converged = true;
  for (const auto& e : r.epochs) row.converged = row.converged && e.estep_converged;
  row.metrics = {*last.test_accuracy, last.corrupted_identified.value_or(kNaN), last.clean_truncated.value_or(kNaN),
                 last.tau};
}

// Scalar Huber mixture: clean N(0, 1), corrupted uniform on [-10, 10]; losses
// are measured against the uniform density.
void estep_trial(const TaskConfig& c, TrialRow& row) {
  CounterRng rng(row.seed);
  const auto m = corrupted_count(c.epsilon, static_cast<std::size_t>(c.n));
  const auto idx = sample_without_replacement(c.n, m, rng);
  std::vector<bool> bad(static_cast<std::size_t>(c.n), false);
  for (auto i : idx) bad[static_cast<std::size_t>(i)] = true;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> wide(-10.0, 10.0);
  const double log_q = -std::log(20.0);
  Eigen::VectorXd losses(c.n);
  for (int i = 0; i < c.n; ++i) {
    const double z = bad[static_cast<std::size_t>(i)] ? wide(rng) : normal(rng);
    losses[i] = 0.5 * z * z + 0.5 * std::log(2.0 * std::numbers::pi) + log_q;
  }
  if (row.method == Method::ml) {
    ml_row(row);
    row.metrics = {negative_elbo(losses, SampleWeights::ones(c.n)), kNaN, row.epsilon_true};
    return;
  }
  EStepResult r;
  row.converged = true;
  try {
    r = fixed_point_estep(losses, std::nullopt, c.em.estep);
  } catch (const EStepConvergenceError& e) {
    r = e.last_iterate();
    row.converged = false;
  }
  row.epsilon_hat = r.epsilon_hat;
  row.iters = r.iterations;
  row.metrics = {r.objective, stationarity_residual(losses, r.weights), std::abs(r.epsilon_hat - row.epsilon_true)};
}

}  // namespace

OnlineMetrics run_online_trial(const TaskConfig& config, std::uint64_t seed) {
  StreamOptions so = config.stream;
  so.dim = config.d;
  SyntheticStream stream(config.n_batches, config.sgd.batch_size, config.pert, seed, so);
  return online_run(stream, {config.sgd, true});
}

TrialRow run_trial(const TaskConfig& config, Method method, int trial, std::uint64_t seed) {
  TrialRow row;
  row.trial = trial;
  row.seed = seed;
  row.method = method;
  row.epsilon_true = config.task == Task::online ? config.pert.mean() : config.epsilon;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.task) {
      case Task::linreg: linreg_trial(config, row); break;
      case Task::logreg: logreg_trial(config, row); break;
      case Task::pca: pca_trial(config, row); break;
      case Task::cov: cov_trial(config, row); break;
      case Task::online: online_trial(config, row); break;
      case Task::nn: nn_trial(config, row); break;
      case Task::estep_bench: estep_trial(config, row); break;
    }
  } catch (const SingularFit&) {
    row.status = "singular_fit";
  } catch (const FitError&) {
    row.status = "fit_error";
  } catch (const DegenerateError&) {
    row.status = "degenerate";
  } catch (const SolverError&) {
    row.status = "solver_error";
  } catch (const InvalidInput&) {
    row.status = "invalid_input";
  } catch (const Error&) {
    row.status = "error";
  }
  if (!row.ok()) {
    row.converged = false;
    row.metrics.assign(metric_columns(config.task).size(), kNaN);
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace rlvi
