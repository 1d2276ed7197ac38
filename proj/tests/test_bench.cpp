#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "rlvi/bench.hpp"
#include "rlvi/csv.hpp"
#include "rlvi/errors.hpp"
#include "rlvi/metrics.hpp"
#include "rlvi/synth.hpp"

using namespace rlvi;

TEST_CASE("rel_error") {
  const Eigen::Vector3d t(1, -2, 2);
  CHECK(rel_error(Eigen::VectorXd(t), t) == 0.0);
  CHECK(rel_error(Eigen::VectorXd::Zero(3), t) == 1.0);
  std::mt19937_64 rng(1);
  const Eigen::VectorXd a = oracle::random_vector(6, rng), b = oracle::random_vector(6, rng);
  double num = 0, den = 0;
  for (int i = 0; i < 6; ++i) num += (a[i] - b[i]) * (a[i] - b[i]), den += b[i] * b[i];
  CHECK(std::abs(rel_error(a, b) - std::sqrt(num / den)) <= 1e-12);
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  CHECK(rel_error_frobenius(2 * m, m) == doctest::Approx(1.0));
}

TEST_CASE("hyperplane_angle") {
  CHECK(hyperplane_angle(Eigen::Vector3d(1, 1, 5), Eigen::Vector3d(2, 2, -1)) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(hyperplane_angle(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)) == doctest::Approx(90.0));
  CHECK(hyperplane_angle(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-3, 0, 0)) == doctest::Approx(180.0));
  CHECK(hyperplane_angle(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1), false) == doctest::Approx(45.0));
}

TEST_CASE("misalignment") {
  const Eigen::Vector2d u(0.6, 0.8);
  CHECK(misalignment(u, u) == doctest::Approx(0.0));
  CHECK(misalignment(u, -u) == doctest::Approx(0.0));
  CHECK(misalignment(u, Eigen::Vector2d(-0.8, 0.6)) == doctest::Approx(1.0));
}

TEST_CASE("min_eigenvalue and correlation") {
  Eigen::Matrix2d s;
  s << 2, 1, 1, 2;
  CHECK(min_eigenvalue(s) == doctest::Approx(1.0));
  CHECK(correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(std::isnan(correlation({1, 1, 1}, {1, 2, 3})));
}

TEST_CASE("summarize") {
  const auto q = summarize({4, 1, 3, 2, std::numeric_limits<double>::quiet_NaN()});
  CHECK(q.count == 4);
  CHECK(q.mean == 2.5);
  CHECK(q.p25 == doctest::Approx(1.75));
  CHECK(q.p50 == doctest::Approx(2.5));
  CHECK(q.p75 == doctest::Approx(3.25));
  CHECK(q.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  const auto e = summarize({});
  CHECK(e.count == 0);
  CHECK(std::isnan(e.mean));
  CHECK(summarize({7}).sd == 0.0);
}

TEST_CASE("csv round trip") {
  const auto set = gen_linreg(30, 4, 0.2, 9);
  std::stringstream ss;
  write_dataset_csv(ss, set.data);
  const auto back = ingest_csv(ss, {}, "mem");
  CHECK(back.features == set.data.features);
  CHECK(back.targets == set.data.targets);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv schema selection") {
  std::istringstream in("a,b,label\n1,2,0\n3,4,1\n");
  CsvSchema schema;
  schema.target_column = "label";
  schema.feature_columns = {"b"};
  const auto d = ingest_csv(in, schema, "mem");
  CHECK(d.features.cols() == 1);
  CHECK(d.features(1, 0) == 4);
  CHECK(d.targets[1] == 1);
  const auto c = to_classification(d);
  CHECK(c.classes == 2);
  CHECK(c.labels[1] == 1);
}

TEST_CASE("csv errors name the line") {
  auto message = [](const std::string& text, const CsvSchema& schema = {}) {
    std::istringstream in(text);
    try {
      ingest_csv(in, schema, "f.csv");
    } catch (const IoError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("").find("empty") != std::string::npos);
  CHECK(message("x0,y\n").find("no data") != std::string::npos);
  CHECK(message("x0,y\n1,2\n3\n").find("f.csv:3") != std::string::npos);
  CHECK(message("x0,y\n1,2\n3\n").find("expected 2 columns, found 1") != std::string::npos);
  CHECK(message("x0,y\n1,abc\n").find("f.csv:2") != std::string::npos);
  CHECK(message("x0,y\n1,inf\n").find("f.csv:2") != std::string::npos);
  CHECK(message("x0,z\n1,2\n").find("y") != std::string::npos);
  CHECK_THROWS_AS(ingest_csv(std::filesystem::path("/nonexistent/file.csv")), IoError);
}

TEST_CASE("task names") {
  for (Task t : {Task::linreg, Task::logreg, Task::pca, Task::cov, Task::online, Task::nn, Task::estep_bench}) {
    CHECK(parse_task(task_name(t)) == t);
  }
  CHECK(task_name(Task::estep_bench) == "estep-bench");
  CHECK(parse_method("ml") == Method::ml);
  CHECK_THROWS_AS(parse_task("bogus"), InvalidInput);
  CHECK(csv_header(Task::linreg) == "trial,seed,method,epsilon_true,epsilon_hat,converged,iters,rel_error,status,wall_ms");
}

TEST_CASE("monte carlo: row count, summary and thread independence") {
  const TaskConfig cfg = default_task_config(Task::linreg);
  MonteCarloConfig mc;
  mc.runs = 100;
  mc.seed = 3;
  mc.threads = 1;
  const auto one = run_monte_carlo(cfg, mc);
  mc.threads = 4;
  const auto four = run_monte_carlo(cfg, mc);
  REQUIRE(one.rows.size() == 200);
  REQUIRE(four.rows.size() == 200);
  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(one.rows[i].seed == four.rows[i].seed);
    CHECK(one.rows[i].metrics == four.rows[i].metrics);
    CHECK(one.rows[i].epsilon_hat == four.rows[i].epsilon_hat);
  }
  CHECK(one.rows[0].method == Method::ml);
  CHECK(one.rows[1].method == Method::rlvi);
  CHECK(one.rows[0].seed == one.rows[1].seed);

  // Summary mean against an independent pass over the CSV text.
  std::stringstream ss;
  write_rows_csv(ss, one);
  std::string line;
  std::getline(ss, line);
  CHECK(line == csv_header(Task::linreg));
  long double sum = 0;
  int rows = 0, count = 0;
  while (std::getline(ss, line)) {
    ++rows;
    const auto cells = split_csv_line(line);
    if (cells[2] == "rlvi" && cells[8] == "ok") sum += std::stold(cells[7]), ++count;
  }
  CHECK(rows == 200);
  CHECK(std::abs(static_cast<double>(sum / count) - one.summary(Method::rlvi).mean) <= 1e-12);
  std::ostringstream summary;
  print_summary(summary, one);
  CHECK(summary.str().find("rel_error") != std::string::npos);
}

TEST_CASE("every task produces ok rows") {
  for (Task t : {Task::linreg, Task::logreg, Task::pca, Task::cov, Task::online, Task::nn, Task::estep_bench}) {
    TaskConfig cfg = default_task_config(t);
    if (t == Task::online) cfg.n_batches = 20;
    if (t == Task::nn) cfg.n = 600, cfg.train.epochs = 5, cfg.train.hidden = 8, cfg.test_n = 200;
    MonteCarloConfig mc;
    mc.runs = 2;
    const auto r = run_monte_carlo(cfg, mc);
    CHECK(r.rows.size() == 4);
    for (const auto& row : r.rows) {
      CHECK(row.status == "ok");
      CHECK(row.metrics.size() == metric_columns(t).size());
    }
  }
}

TEST_CASE("trial failures become status rows") {
  TaskConfig cfg = default_task_config(Task::linreg);
  cfg.n = 8;  // fewer samples than parameters
  const auto row = run_trial(cfg, Method::ml, 0, 1);
  CHECK(row.status == "singular_fit");
  CHECK(std::isnan(row.metrics[0]));
}

TEST_CASE("sweep") {
  const TaskConfig cfg = default_task_config(Task::linreg);
  MonteCarloConfig mc;
  mc.runs = 10;
  mc.seed = 4;
  const auto single = sweep_epsilon(cfg, mc, {0.0});
  CHECK(single.size() == 2);
  const auto pts = sweep_epsilon(cfg, mc, {0.1, 0.3});
  REQUIRE(pts.size() == 4);
  TaskConfig at = cfg;
  at.epsilon = 0.3;
  const auto direct = run_monte_carlo(at, mc);
  CHECK(pts[2].epsilon == 0.3);
  CHECK(pts[2].stats.mean == direct.summary(pts[2].method).mean);
  std::ostringstream out;
  write_sweep_csv(out, pts);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(default_eps_grid().size() == 9);
}

TEST_CASE("config validation") {
  TaskConfig cfg = default_task_config(Task::cov);
  cfg.n0 = 60;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  MonteCarloConfig mc;
  mc.runs = 0;
  CHECK_THROWS_AS(mc.validate(), InvalidInput);
}
