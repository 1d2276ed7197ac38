#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rlvi/nn.hpp"
#include "rlvi/synth.hpp"

using namespace rlvi;

namespace {

double weighted_loss(Mlp net, const Eigen::VectorXd& flat, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                     const Eigen::VectorXd& w) {
  net.assign(flat);
  // Reference cross-entropy straight from the softmax probabilities.
  const Eigen::MatrixXd p = net.probabilities(x);
  double total = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) total -= w[i] * std::log(p(i, y[i]));
  return total;
}

Eigen::VectorXi random_labels(Eigen::Index n, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, classes - 1);
  Eigen::VectorXi y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = u(rng);
  return y;
}

struct Split {
  ClassificationSet train, val, test;
};

Split blob_split(int n, double eps, std::uint64_t seed) {
  const auto model = make_blob_model(10, 3, seed);
  CounterRng rng(seed, 1);
  ClassificationSet pool = sample_blobs(model, n, rng);
  const auto flip = flip_labels(pool.labels, 3, FlipKind::symmetric, eps, seed + 7);
  const int nv = n / 10;
  Split s;
  s.val = {pool.features.topRows(nv), flip.labels.head(nv), 3, {}};
  s.train = {pool.features.bottomRows(n - nv), flip.labels.tail(n - nv), 3,
             CorruptionMask(flip.corrupted.begin() + nv, flip.corrupted.end())};
  CounterRng trng(seed, 2);
  s.test = sample_blobs(model, 1000, trng);
  return s;
}

}  // namespace

TEST_CASE("mlp shapes and flatten round trip") {
  CounterRng rng(1);
  Mlp net = Mlp::random(4, 5, 3, rng);
  CHECK(net.parameter_count() == 5 * 4 + 5 + 3 * 5 + 3);
  const Eigen::VectorXd flat = net.flatten();
  Mlp other(4, 5, 3);
  other.assign(flat);
  CHECK(other.flatten() == flat);
  CHECK_THROWS_AS(Mlp(0, 5, 3), InvalidInput);
  CHECK_THROWS_AS(other.assign(Eigen::VectorXd::Zero(3)), InvalidInput);
  const Eigen::MatrixXd p = net.probabilities(Eigen::MatrixXd::Random(7, 4) * 10);
  for (Eigen::Index i = 0; i < 7; ++i) CHECK(std::abs(p.row(i).sum() - 1) <= 1e-9);
}

TEST_CASE("forward_backward basics") {
  CounterRng rng(2);
  const Mlp net = Mlp::random(3, 4, 3, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 3);
  const Eigen::VectorXi y = (Eigen::VectorXi(6) << 0, 1, 2, 0, 1, 2).finished();
  SUBCASE("zero weights give a zero gradient") {
    const auto fb = forward_backward(net, x, y, Eigen::VectorXd::Zero(6));
    CHECK(fb.gradient.flatten().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("uniform logits give ln C") {
    const Mlp flat(3, 4, 3);
    const auto fb = forward_backward(flat, x, y, Eigen::VectorXd::Ones(6));
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(fb.losses[i] == doctest::Approx(std::log(3.0)));
  }
  SUBCASE("weights must lie in [0, 1]") {
    CHECK_THROWS_AS(forward_backward(net, x, y, Eigen::VectorXd::Constant(6, 1.5)), InvalidInput);
  }
  SUBCASE("non-finite activations are rejected") {
    Eigen::MatrixXd bad = x;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(forward_backward(net, bad, y, Eigen::VectorXd::Ones(6)), SolverError);
  }
  SUBCASE("large logits stay finite") {
    Mlp big = net;
    big.w2 *= 1e4;
    const auto fb = forward_backward(big, x, y, Eigen::VectorXd::Ones(6));
    CHECK(fb.losses.allFinite());
  }
}

TEST_CASE("backpropagation matches finite differences") {
  std::mt19937_64 gen(3);
  SUBCASE("2-2-2 net, five samples") {
    CounterRng rng(4);
    const Mlp net = Mlp::random(2, 2, 2, rng);
    const Eigen::MatrixXd x = oracle::random_matrix(5, 2, gen);
    const Eigen::VectorXi y = random_labels(5, 2, gen);
    const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(5, 0.1, 1.0);
    const auto fb = forward_backward(net, x, y, w);
    const auto fd = oracle::central_difference(
        [&](const Eigen::VectorXd& f) { return weighted_loss(net, f, x, y, w); }, net.flatten());
    CHECK(oracle::relative_deviation(fb.gradient.flatten(), fd) <= 1e-4);
  }
  SUBCASE("random shapes") {
    for (int t = 0; t < 50; ++t) {
      CounterRng rng(100 + t);
      const int d = 1 + t % 4, h = 2 + t % 5, c = 2 + t % 3;
      const Mlp net = Mlp::random(d, h, c, rng);
      const Eigen::MatrixXd x = oracle::random_matrix(8, d, gen);
      const Eigen::VectorXi y = random_labels(8, c, gen);
      Eigen::VectorXd w = (oracle::random_vector(8, gen).array().abs()).matrix();
      w /= w.maxCoeff();
      const auto fb = forward_backward(net, x, y, w);
      for (Eigen::Index i = 0; i < 8; ++i) {
        CHECK(fb.losses[i] == doctest::Approx(-std::log(net.probabilities(x.row(i))(0, y[i]))).epsilon(1e-10));
      }
      const auto fd = oracle::central_difference(
          [&](const Eigen::VectorXd& f) { return weighted_loss(net, f, x, y, w); }, net.flatten());
      CHECK(oracle::relative_deviation(fb.gradient.flatten(), fd) <= 1e-4);
    }
  }
}

TEST_CASE("detect_overfit") {
  CHECK_FALSE(detect_overfit({0.80, 0.82, 0.83}));
  CHECK(detect_overfit({0.80, 0.84, 0.81}));
  CHECK_FALSE(detect_overfit({0.5, 0.5}));
  CHECK_FALSE(detect_overfit({}));
  CHECK_FALSE(detect_overfit({0.8, 0.8, 0.8}));
}

TEST_CASE("training state invariants under label noise") {
  const Split s = blob_split(1000, 0.4, 11);
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.hidden = 16;
  CounterRng rng(5);
  const auto r = train_rlvi(Mlp::random(10, 16, 3, rng), s.train, s.val, cfg, &s.test);
  REQUIRE(r.epochs.size() == 25);
  for (std::size_t e = 1; e < r.epochs.size(); ++e) {
    CHECK(r.epochs[e].tau >= r.epochs[e - 1].tau);
    if (r.epochs[e - 1].overfit) CHECK(r.epochs[e].overfit);
  }
  for (const auto& m : r.epochs) {
    CHECK(m.test_accuracy.has_value());
    CHECK(m.corrupted_identified.has_value());
  }
  const double tau = r.state.tau;
  for (Eigen::Index i = 0; i < r.state.pi.size(); ++i) {
    const double p = r.state.pi[i];
    CHECK((p == 0.0 || (p >= tau && p <= 1.0)));
  }
  CHECK(r.state.loss_buffer.size() == s.train.features.rows());
  CHECK(r.state.val_acc_history.size() == 25);
  CHECK(r.model.all_finite());
}

TEST_CASE("training is deterministic") {
  const Split s = blob_split(400, 0.2, 12);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.hidden = 8;
  CounterRng a(6), b(6);
  const auto r1 = train_rlvi(Mlp::random(10, 8, 3, a), s.train, s.val, cfg);
  const auto r2 = train_rlvi(Mlp::random(10, 8, 3, b), s.train, s.val, cfg);
  CHECK(r1.model.flatten() == r2.model.flatten());
  CHECK(r1.state.pi.values() == r2.state.pi.values());
}

TEST_CASE("clean blobs: robust training matches the plain twin") {
  double gap = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Split s = blob_split(1500, 0.0, 20 + seed);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.hidden = 32;
    CounterRng r1(seed), r2(seed);
    const auto robust = train_rlvi(Mlp::random(10, 32, 3, r1), s.train, s.val, cfg, &s.test);
    cfg.robust = false;
    const auto plain = train_rlvi(Mlp::random(10, 32, 3, r2), s.train, s.val, cfg, &s.test);
    gap += *plain.epochs.back().test_accuracy - *robust.epochs.back().test_accuracy;
  }
  CHECK(gap / 5 <= 0.02);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("without truncation the network memorises corrupted labels") {
  double with = 0, without = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Split s = blob_split(3000, 0.4, 40 + seed);
    TrainConfig cfg;
    CounterRng r1(seed), r2(seed);
    with += *train_rlvi(Mlp::random(10, cfg.hidden, 3, r1), s.train, s.val, cfg).epochs.back().corrupted_identified;
    cfg.truncation = false;
    without += *train_rlvi(Mlp::random(10, cfg.hidden, 3, r2), s.train, s.val, cfg).epochs.back().corrupted_identified;
  }
  CHECK(with > without);
}
