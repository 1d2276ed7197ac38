#include <cmath>
#include <random>

#include "rlvi/errors.hpp"
#include "rlvi/nn.hpp"

namespace rlvi {

Mlp::Mlp(int input_dim, int hidden, int classes)
    : w1(Eigen::MatrixXd::Zero(hidden, input_dim)),
      b1(Eigen::VectorXd::Zero(hidden)),
      w2(Eigen::MatrixXd::Zero(classes, hidden)),
      b2(Eigen::VectorXd::Zero(classes)) {
  if (input_dim <= 0 || hidden <= 0 || classes < 2) throw InvalidInput("invalid network shape");
}

Mlp Mlp::random(int input_dim, int hidden, int classes, CounterRng& rng) {
  Mlp m(input_dim, hidden, classes);
  std::normal_distribution<double> n1(0.0, 1.0 / std::sqrt(static_cast<double>(input_dim)));
  std::normal_distribution<double> n2(0.0, 1.0 / std::sqrt(static_cast<double>(hidden)));
  for (Eigen::Index i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = n1(rng);
  for (Eigen::Index i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = n2(rng);
  return m;
}

Eigen::Index Mlp::parameter_count() const noexcept {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

bool Mlp::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index k = 0;
  flat.segment(k, w1.size()) = w1.reshaped(); k += w1.size();
  flat.segment(k, b1.size()) = b1; k += b1.size();
  flat.segment(k, w2.size()) = w2.reshaped(); k += w2.size();
  flat.segment(k, b2.size()) = b2;
  return flat;
}

void Mlp::assign(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw InvalidInput("parameter vector has the wrong length");
  Eigen::Index k = 0;
  w1.reshaped() = flat.segment(k, w1.size()); k += w1.size();
  b1 = flat.segment(k, b1.size()); k += b1.size();
  w2.reshaped() = flat.segment(k, w2.size()); k += w2.size();
  b2 = flat.segment(k, b2.size());
}

namespace {

struct Forward {
  Eigen::MatrixXd hidden;  // n x h, tanh activations
  Eigen::MatrixXd logits;  // n x C
};

Forward forward(const Mlp& mlp, const Eigen::MatrixXd& x) {
  if (x.cols() != mlp.input_dim()) throw InvalidInput("input width does not match the network");
  Forward f;
  f.hidden = ((x * mlp.w1.transpose()).rowwise() + mlp.b1.transpose()).array().tanh().matrix();
  f.logits = (f.hidden * mlp.w2.transpose()).rowwise() + mlp.b2.transpose();
  if (!f.logits.allFinite()) throw SolverError("non-finite activations in forward pass");
  return f;
}

// Softmax in place, returning each row's log-sum-exp.
Eigen::VectorXd softmax_rows(Eigen::MatrixXd& z) {
  Eigen::VectorXd lse(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double top = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - top).exp().matrix();
    const double total = z.row(i).sum();
    z.row(i) /= total;
    lse[i] = top + std::log(total);
  }
  return lse;
}

}  // namespace

Eigen::MatrixXd Mlp::probabilities(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = forward(*this, x).logits;
  softmax_rows(z);
  return z;
}

Eigen::VectorXi Mlp::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd z = forward(*this, x).logits;
  Eigen::VectorXi out(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) z.row(i).maxCoeff(&out[i]);
  return out;
}

ForwardBackward forward_backward(const Mlp& mlp, const Eigen::MatrixXd& x, const Eigen::VectorXi& labels,
                                 const Eigen::VectorXd& weights) {
  const Eigen::Index n = x.rows();
  if (labels.size() != n || weights.size() != n) throw InvalidInput("batch arrays differ in length");
  if (!weights.allFinite() || (weights.array() < 0.0).any() || (weights.array() > 1.0).any()) {
    throw InvalidInput("weights must lie in [0, 1]");
  }
  Forward f = forward(mlp, x);
  Eigen::MatrixXd p = f.logits;
  const Eigen::VectorXd lse = softmax_rows(p);

  ForwardBackward out{Eigen::VectorXd(n), Mlp(mlp.input_dim(), mlp.hidden(), mlp.classes())};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= mlp.classes()) throw InvalidInput("label out of range");
    out.losses[i] = lse[i] - f.logits(i, y);
    p(i, y) -= 1.0;
  }
  const Eigen::MatrixXd dz = weights.asDiagonal() * p;  // n x C
  out.gradient.w2 = dz.transpose() * f.hidden;
  out.gradient.b2 = dz.colwise().sum().transpose();
  const Eigen::MatrixXd da = ((dz * mlp.w2).array() * (1.0 - f.hidden.array().square())).matrix();
  out.gradient.w1 = da.transpose() * x;
  out.gradient.b1 = da.colwise().sum().transpose();
  return out;
}

double accuracy(const Mlp& mlp, const ClassificationSet& set) {
  if (set.size() == 0) throw InvalidInput("empty evaluation set");
  const Eigen::VectorXi predicted = mlp.predict(set.features);
  return static_cast<double>((predicted.array() == set.labels.array()).count()) / static_cast<double>(set.size());
}

bool detect_overfit(const std::vector<double>& history) {
  const std::size_t k = history.size();
  if (k < 3) return false;
  return history[k - 1] < 0.5 * (history[k - 2] + history[k - 3]);
}

}  // namespace rlvi
