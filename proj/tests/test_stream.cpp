#include <doctest.h>

#include <cmath>
#include <vector>

#include "rlvi/metrics.hpp"
#include "rlvi/stream.hpp"

using namespace rlvi;

namespace {

// Replays a fixed list of batches.
class ListSource final : public BatchSource {
 public:
  explicit ListSource(std::vector<BatchPair> batches) : batches_(std::move(batches)) {}
  std::optional<BatchPair> next() override {
    if (at_ == batches_.size()) return std::nullopt;
    return batches_[at_++];
  }

 private:
  std::vector<BatchPair> batches_;
  std::size_t at_ = 0;
};

std::vector<BatchPair> drain(BatchSource& s) {
  std::vector<BatchPair> out;
  while (auto b = s.next()) out.push_back(std::move(*b));
  return out;
}

Eigen::VectorXd plain_gradient(const LogRegParams& p, const LabeledData& d) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.theta.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double s = 1 / (1 + std::exp(-d.features.row(i).dot(p.theta)));
    g += (s - d.targets[i]) * d.features.row(i).transpose();
  }
  return g;
}

}  // namespace

TEST_CASE("weighted step with unit weights is plain SGD") {
  auto stream = gen_stream(3, 50, {0, 0.1, 0.3}, 4);
  const auto batches = drain(stream);
  LogRegParams p{Eigen::VectorXd::Constant(11, 0.1)};
  const auto& d = batches[0].train;
  const auto q = weighted_sgd_step(p, d, Eigen::VectorXd::Ones(d.size()), 0.05);
  const Eigen::VectorXd ref = p.theta - 0.05 * plain_gradient(p, d);
  CHECK((q.theta - ref).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(weighted_sgd_step(p, d, Eigen::VectorXd::Ones(d.size()), 0.0).theta == p.theta);
}

TEST_CASE("confidently fitted clean batch reduces to plain SGD") {
  LabeledData d{Eigen::MatrixXd(6, 1), Eigen::VectorXd(6)};
  d.features << 8, 9, 10, -8, -9, -10;
  d.targets << 1, 1, 1, 0, 0, 0;
  const LogRegParams p{Eigen::VectorXd::Constant(1, 1.0)};
  SgdConfig cfg;
  cfg.estep.init_mean = 0.999;
  const auto step = rlvi_sgd_step(p, d, cfg);
  CHECK(step.weights.values().minCoeff() == 1.0);
  const auto plain = weighted_sgd_step(p, d, Eigen::VectorXd::Ones(6), cfg.learning_rate);
  CHECK((step.params.theta - plain.theta).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("a high-loss sample is all but ignored") {
  // Four samples at loss softplus(-2.25) ~ 0.1 and one at loss ~ 50.
  LabeledData d{Eigen::MatrixXd(5, 1), Eigen::VectorXd(5)};
  d.features << 2.25, 2.25, 2.25, 2.25, 50;
  d.targets << 1, 1, 1, 1, 0;
  const LogRegParams p{Eigen::VectorXd::Constant(1, 1.0)};
  const auto step = rlvi_sgd_step(p, d, SgdConfig{});
  const auto& w = step.weights.values();
  CHECK(w[4] < 1e-3 * w[0]);
  const double shift = std::log(w.mean() / (1 - w.mean()));
  CHECK(w[4] == doctest::Approx(1 / (1 + std::exp(-(shift - (50 - std::log(2.0)))))).epsilon(1e-6));
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  auto stream = gen_stream(2, 100, {0, 0.1, 0.3}, 5);
  const auto b = drain(stream);
  SgdConfig cfg;
  cfg.learning_rate = 0;
  const LogRegParams p{Eigen::VectorXd::LinSpaced(11, -1, 1)};
  CHECK(rlvi_sgd_step(p, b[0].train, cfg).params.theta == p.theta);
}

TEST_CASE("non-finite gradients are rejected") {
  LabeledData d{Eigen::MatrixXd::Ones(2, 1), Eigen::VectorXd::Ones(2)};
  d.features(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(weighted_sgd_step({Eigen::VectorXd::Ones(1)}, d, Eigen::VectorXd::Ones(2), 0.1), SolverError);
}

TEST_CASE("online_run bookkeeping") {
  SUBCASE("single batch gives one record") {
    auto s = gen_stream(1, 100, {0, 0.1, 0.3}, 1);
    const auto m = online_run(s, {});
    CHECK(m.rlvi.size() == 1);
    CHECK(m.plain.size() == 1);
  }
  SUBCASE("twin can be switched off") {
    auto s = gen_stream(3, 100, {0, 0.1, 0.3}, 1);
    OnlineConfig cfg;
    cfg.plain_twin = false;
    const auto m = online_run(s, cfg);
    CHECK(m.rlvi.size() == 3);
    CHECK(m.plain.empty());
  }
  SUBCASE("plain twin matches a manual loop bit for bit") {
    auto s = gen_stream(20, 100, {0, 0.1, 0.3}, 2);
    const auto batches = drain(s);
    ListSource replay(batches);
    const auto m = online_run(replay, {});
    LogRegParams p{Eigen::VectorXd::Zero(11)};
    for (const auto& b : batches) p = weighted_sgd_step(p, b.train, Eigen::VectorXd::Ones(b.train.size()), 0.05);
    CHECK(m.plain_params.theta == p.theta);
  }
  SUBCASE("metrics stay in range") {
    auto s = gen_stream(30, 100, {0, 0.1, 0.3}, 3);
    const auto m = online_run(s, {});
    for (const auto& r : m.rlvi) {
      CHECK(r.accuracy >= 0);
      CHECK(r.accuracy <= 1);
      CHECK(r.recall >= 0);
      CHECK(r.recall <= 1);
      CHECK(r.epsilon_hat >= 0);
      CHECK(r.epsilon_hat <= 1);
    }
  }
}

TEST_CASE("clean stream: robust and plain SGD agree") {
  double gap = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = gen_stream(100, 100, {0, 0, 0}, seed);
    const auto m = online_run(s, {});
    gap += m.rlvi.back().accuracy - m.plain.back().accuracy;
  }
  CHECK(std::abs(gap / 20) <= 0.03);
}

TEST_CASE("per-batch corruption estimate tracks the truth") {
  auto s = gen_stream(240, 100, {0, 0.1, 0.3}, 9);
  const auto m = online_run(s, {});
  std::vector<double> truth, est;
  for (const auto& r : m.rlvi) {
    truth.push_back(r.epsilon_true);
    est.push_back(r.epsilon_hat);
  }
  CHECK(correlation(truth, est) >= 0.3);
}

TEST_CASE("tail_mean and moving_average") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(tail_mean(v, 2) == 3.5);
  CHECK(tail_mean(v, 10) == 2.5);
  const auto ma = moving_average(v, 2);
  REQUIRE(ma.size() == 4);
  CHECK(ma[0] == 1.0);
  CHECK(ma[1] == 1.5);
  CHECK(ma[3] == 3.5);
}

TEST_CASE("DatasetBatchSource") {
  LabeledData d{Eigen::MatrixXd::Random(450, 2), Eigen::VectorXd::Ones(450)};
  DatasetBatchSource src(d, 100, {0.2, 0.2, 0.2}, 7);
  const auto batches = drain(src);
  REQUIRE(batches.size() == 2);
  for (const auto& b : batches) {
    CHECK(b.train.features.cols() == 3);
    CHECK(b.train.features.col(2).minCoeff() == 1.0);
    CHECK(b.test.targets.sum() == 100);
    CHECK(b.train.targets.sum() == 100 - 20);
    CHECK(b.flip_fraction == doctest::Approx(0.2));
  }
}
