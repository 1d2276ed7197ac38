#pragma once

// Monte-Carlo benchmark harness: seeded trials of each experiment for the
// plain-ML baseline and RLVI, one CSV row per (trial, method).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlvi/em.hpp"
#include "rlvi/metrics.hpp"
#include "rlvi/nn.hpp"
#include "rlvi/stream.hpp"
#include "rlvi/synth.hpp"

namespace rlvi {

enum class Task { linreg, logreg, pca, cov, online, nn, estep_bench };
enum class Method { ml, rlvi };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);
std::string_view method_name(Method method);
Method parse_method(std::string_view name);

/// Every knob of every experiment. `default_task_config` fills in the
/// standard setting of each task.
struct TaskConfig {
  Task task = Task::linreg;
  int n = 40;
  int d = 10;
  double epsilon = 0.2;
  double n0 = 35.0;  // cov: minimum clean mass

  // online
  int n_batches = 240;
  Pert pert{0.0, 0.1, 0.3};
  SgdConfig sgd;
  std::size_t recall_window = 100;

  // nn
  int classes = 3;
  int test_n = 1000;
  double val_fraction = 0.1;
  FlipKind noise = FlipKind::symmetric;
  TrainConfig train;

  EmConfig em;
  LinRegOptions linreg;
  LogRegOptions logreg;
  PcaOptions pca;
  GaussOptions gauss;
  StreamOptions stream;
  BlobOptions blobs;

  void validate() const;
};

TaskConfig default_task_config(Task task);

/// Names of the task-specific metric columns, in CSV order. The first one is
/// the task's headline error metric.
std::vector<std::string> metric_columns(Task task);

/// Full CSV header: trial,seed,method,epsilon_true,epsilon_hat,converged,iters,
/// <metric columns>,status,wall_ms
std::string csv_header(Task task);

struct TrialRow {
  int trial = 0;
  std::uint64_t seed = 0;
  Method method = Method::rlvi;
  double epsilon_true = 0.0;
  double epsilon_hat = 0.0;
  bool converged = false;
  int iters = 0;
  std::vector<double> metrics;
  std::string status = "ok";  // or an error code such as singular_fit
  double wall_ms = 0.0;

  bool ok() const noexcept { return status == "ok"; }
};

/// One trial. Library errors become a row with a non-ok status and NaN
/// metrics; the dataset depends only on (config, seed), so both methods of a
/// trial see identical data.
TrialRow run_trial(const TaskConfig& config, Method method, int trial, std::uint64_t seed);

/// Per-batch records of one online trial, for time-series output.
OnlineMetrics run_online_trial(const TaskConfig& config, std::uint64_t seed);

struct MonteCarloConfig {
  int runs = 100;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::ml, Method::rlvi};
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct MonteCarloResult {
  Task task = Task::linreg;
  std::vector<TrialRow> rows;  // ordered by trial, then method
  std::size_t failures = 0;

  double failure_rate() const;
  /// Headline-metric summary (or metric `column`) over ok rows of `method`.
  Quartiles summary(Method method, std::size_t column = 0) const;
};

/// Trial seeds come from counter splitting of `seed`, and rows are stored by
/// trial index, so the thread count never changes the output.
MonteCarloResult run_monte_carlo(const TaskConfig& config, const MonteCarloConfig& mc);

void write_rows_csv(std::ostream& out, const MonteCarloResult& result, bool header = true);

/// Quartile table (25th, 50th, 75th percentile and mean) per method.
void print_summary(std::ostream& out, const MonteCarloResult& result);

struct SweepPoint {
  double epsilon = 0.0;
  Method method = Method::rlvi;
  Quartiles stats;
  std::size_t failures = 0;
};

std::vector<double> default_eps_grid();

/// run_monte_carlo at each corruption level; one summary per (epsilon, method).
std::vector<SweepPoint> sweep_epsilon(const TaskConfig& config, const MonteCarloConfig& mc,
                                      const std::vector<double>& grid);

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace rlvi
