#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

#include "rlvi/bench.hpp"
#include "rlvi/csv.hpp"

namespace rlvi {

void MonteCarloConfig::validate() const {
  if (runs < 1) throw InvalidInput("runs must be at least 1");
  if (methods.empty()) throw InvalidInput("no methods selected");
  if (threads < 0) throw InvalidInput("thread count must be nonnegative");
}

double MonteCarloResult::failure_rate() const {
  return rows.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(rows.size());
}

Quartiles MonteCarloResult::summary(Method method, std::size_t column) const {
  std::vector<double> values;
  for (const auto& r : rows)
    if (r.method == method && r.ok() && column < r.metrics.size()) values.push_back(r.metrics[column]);
  return summarize(std::move(values));
}

MonteCarloResult run_monte_carlo(const TaskConfig& config, const MonteCarloConfig& mc) {
  config.validate();
  mc.validate();
  const std::size_t per_trial = mc.methods.size();
  const std::size_t jobs = static_cast<std::size_t>(mc.runs) * per_trial;

  MonteCarloResult result;
  result.task = config.task;
  result.rows.resize(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const int trial = static_cast<int>(j / per_trial);
      const std::uint64_t seed = derive_seed(mc.seed, static_cast<std::uint64_t>(trial));
      result.rows[j] = run_trial(config, mc.methods[j % per_trial], trial, seed);
    }
  };

  unsigned threads = mc.threads > 0 ? static_cast<unsigned>(mc.threads) : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(jobs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  result.failures = static_cast<std::size_t>(
      std::count_if(result.rows.begin(), result.rows.end(), [](const TrialRow& r) { return !r.ok(); }));
  return result;
}

void write_rows_csv(std::ostream& out, const MonteCarloResult& result, bool header) {
  if (header) out << csv_header(result.task) << '\n';
  for (const auto& r : result.rows) {
    out << r.trial << ',' << r.seed << ',' << method_name(r.method) << ',' << format_double(r.epsilon_true) << ','
        << format_double(r.epsilon_hat) << ',' << (r.converged ? 1 : 0) << ',' << r.iters;
    for (double m : r.metrics) out << ',' << format_double(m);
    out << ',' << r.status << ',' << format_double(r.wall_ms) << '\n';
  }
}

void print_summary(std::ostream& out, const MonteCarloResult& result) {
  const auto columns = metric_columns(result.task);
  std::vector<Method> methods;
  for (const auto& r : result.rows)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);

  out << task_name(result.task) << ": " << result.rows.size() << " rows, " << result.failures << " failed\n";
  out << std::left << std::setw(6) << "method" << ' ' << std::setw(22) << "metric" << std::right << std::setw(6)
      << "n" << std::setw(14) << "p25" << std::setw(14) << "median" << std::setw(14) << "p75" << std::setw(14)
      << "mean" << '\n';
  for (Method m : methods) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const Quartiles q = result.summary(m, k);
      out << std::left << std::setw(6) << method_name(m) << ' ' << std::setw(22) << columns[k] << std::right
          << std::setw(6) << q.count << std::setprecision(6) << std::setw(14) << q.p25 << std::setw(14) << q.p50
          << std::setw(14) << q.p75 << std::setw(14) << q.mean << '\n';
    }
  }
}

std::vector<double> default_eps_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(0.05 * k);
  return grid;
}

std::vector<SweepPoint> sweep_epsilon(const TaskConfig& config, const MonteCarloConfig& mc,
                                      const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidInput("empty epsilon grid");
  std::vector<SweepPoint> points;
  for (double eps : grid) {
    TaskConfig c = config;
    c.epsilon = eps;
    const MonteCarloResult r = run_monte_carlo(c, mc);
    for (Method m : mc.methods) {
      SweepPoint p;
      p.epsilon = eps;
      p.method = m;
      p.stats = r.summary(m);
      p.failures = static_cast<std::size_t>(std::count_if(
          r.rows.begin(), r.rows.end(), [&](const TrialRow& row) { return row.method == m && !row.ok(); }));
      points.push_back(p);
    }
  }
  return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "epsilon,method,runs_ok,failures,mean,p25,p50,p75,sd\n";
  for (const auto& p : points) {
    out << format_double(p.epsilon) << ',' << method_name(p.method) << ',' << p.stats.count << ',' << p.failures
        << ',' << format_double(p.stats.mean) << ',' << format_double(p.stats.p25) << ','
        << format_double(p.stats.p50) << ',' << format_double(p.stats.p75) << ',' << format_double(p.stats.sd)
        << '\n';
  }
}

}  // namespace rlvi
