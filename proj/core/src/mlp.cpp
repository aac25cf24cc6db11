#include "hatestack/mlp.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "hatestack/error.hpp"
#include "hatestack/rng.hpp"

namespace hatestack {

MlpModel::MlpModel(Matrix w1, Vector b1, Matrix w2, Vector b2, Activation activation)
    : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(std::move(b2)), activation_(activation) {}

namespace {

double activate(double z, Activation a) { return a == Activation::Tanh ? std::tanh(z) : (z > 0 ? z : 0.0); }

/// Derivative expressed through the activation output h.
double activate_grad(double z, double h, Activation a) {
  return a == Activation::Tanh ? 1.0 - h * h : (z > 0 ? 1.0 : 0.0);
}

void softmax(const double* logits, double* out) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  double sum = 0;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::exp(logits[c] - m);
    sum += out[c];
  }
  for (int c = 0; c < 3; ++c) out[c] /= sum;
}

}  // namespace

MlpModel::Probs MlpModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw DataError("mlp: expected " + std::to_string(input_dim()) + " inputs, got " + std::to_string(x.size()));
  }
  Vector z = w1_ * as_vector(x) + b1_;
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = activate(z(j), activation_);
  const Vector logits = w2_ * z + b2_;
  Probs p;
  softmax(logits.data(), p.data());
  return p;
}

Envelope MlpModel::to_envelope() const {
  Envelope e;
  e.kind = "mlp";
  e.params = Json{{"input_dim", input_dim()},
                  {"hidden", hidden()},
                  {"activation", activation_ == Activation::Tanh ? "tanh" : "relu"}};
  e.arrays["w1"] = std::vector<double>(w1_.data(), w1_.data() + w1_.size());
  e.arrays["b1"] = std::vector<double>(b1_.begin(), b1_.end());
  e.arrays["w2"] = std::vector<double>(w2_.data(), w2_.data() + w2_.size());
  e.arrays["b2"] = std::vector<double>(b2_.begin(), b2_.end());
  return e;
}

MlpModel MlpModel::from_envelope(const Envelope& e) {
  e.expect("mlp", 1);
  const Eigen::Index d = e.params.at("input_dim").get<int>();
  const Eigen::Index h = e.params.at("hidden").get<int>();
  const auto& w1 = e.array("w1");
  const auto& b1 = e.array("b1");
  const auto& w2 = e.array("w2");
  const auto& b2 = e.array("b2");
  if (static_cast<Eigen::Index>(w1.size()) != h * d || static_cast<Eigen::Index>(b1.size()) != h ||
      static_cast<Eigen::Index>(w2.size()) != 3 * h || b2.size() != 3) {
    throw DataError("mlp envelope: size mismatch");
  }
  const std::string act = e.params.at("activation").get<std::string>();
  if (act != "tanh" && act != "relu") throw DataError("mlp envelope: unknown activation '" + act + "'");
  return MlpModel(Eigen::Map<const Matrix>(w1.data(), h, d), Eigen::Map<const Vector>(b1.data(), h),
                  Eigen::Map<const Matrix>(w2.data(), 3, h), Eigen::Map<const Vector>(b2.data(), 3),
                  act == "tanh" ? Activation::Tanh : Activation::Relu);
}

namespace {

/// Loss and gradient over rows[begin, end) of `order` (all rows when order
/// is empty).
double objective_rows(const MlpModel& m, const Matrix& X, std::span<const int> y, double l2,
                      std::span<const int> rows, MlpGradient* grad) {
  const Eigen::Index h = m.hidden();
  if (grad) {
    grad->w1 = Matrix::Zero(h, X.cols());
    grad->b1 = Vector::Zero(h);
    grad->w2 = Matrix::Zero(3, h);
    grad->b2 = Vector::Zero(3);
  }
  double loss = 0;
  Vector pre(h), act(h), delta_h(h);
  double probs[3];
  for (int r : rows) {
    const auto x = as_vector(row_span(X, r));
    pre = m.w1() * x + m.b1();
    for (Eigen::Index j = 0; j < h; ++j) act(j) = activate(pre(j), m.activation());
    const Vector logits = m.w2() * act + m.b2();
    softmax(logits.data(), probs);
    loss -= std::log(std::max(probs[y[r]], 1e-300));
    if (!grad) continue;
    Eigen::Vector3d delta_o(probs[0], probs[1], probs[2]);
    delta_o(y[r]) -= 1.0;
    grad->w2.noalias() += delta_o * act.transpose();
    grad->b2 += delta_o;
    delta_h = m.w2().transpose() * delta_o;
    for (Eigen::Index j = 0; j < h; ++j) delta_h(j) *= activate_grad(pre(j), act(j), m.activation());
    grad->w1.noalias() += delta_h * x.transpose();
    grad->b1 += delta_h;
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  loss = loss * inv + 0.5 * l2 * (m.w1().squaredNorm() + m.w2().squaredNorm());
  if (grad) {
    grad->w1 = grad->w1 * inv + l2 * m.w1();
    grad->b1 *= inv;
    grad->w2 = grad->w2 * inv + l2 * m.w2();
    grad->b2 *= inv;
  }
  return loss;
}

}  // namespace

double mlp_objective(const MlpModel& model, const Matrix& X, std::span<const int> y, double l2, MlpGradient* grad) {
  if (model.input_dim() != X.cols()) throw DataError("mlp_objective: dimension mismatch");
  std::vector<int> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  return objective_rows(model, X, y, l2, rows, grad);
}

MlpModel fit_mlp(const Matrix& X, std::span<const int> y, const MlpParams& params) {
  const auto n = static_cast<int>(X.rows());
  if (n == 0) throw DataError("fit_mlp: empty training set");
  if (static_cast<int>(y.size()) != n) throw DataError("fit_mlp: label count mismatch");
  for (int v : y) {
    if (v < 0 || v > 2) throw DataError("fit_mlp: labels must be 0, 1 or 2");
  }
  if (params.hidden < 1 || params.batch_size < 1 || params.epochs < 0) throw UsageError("fit_mlp: invalid parameters");

  Rng rng(params.seed);
  const Eigen::Index d = X.cols(), h = params.hidden;
  const double r1 = std::sqrt(6.0 / static_cast<double>(d + h));
  const double r2 = std::sqrt(6.0 / static_cast<double>(h + 3));
  Matrix w1(h, d), w2(3, h);
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = rng.uniform(-r1, r1);
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2.data()[i] = rng.uniform(-r2, r2);
  MlpModel model(std::move(w1), Vector::Zero(h), std::move(w2), Vector::Zero(3), params.activation);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  MlpGradient g;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double epoch_loss = 0;
    for (int start = 0; start < n; start += params.batch_size) {
      const int len = std::min(params.batch_size, n - start);
      const std::span<const int> batch(order.data() + start, static_cast<std::size_t>(len));
      epoch_loss += objective_rows(model, X, y, params.l2, batch, &g) * len;
      model.w1() -= params.learning_rate * g.w1;
      model.b1() -= params.learning_rate * g.b1;
      model.w2() -= params.learning_rate * g.w2;
      model.b2() -= params.learning_rate * g.b2;
    }
    if (!std::isfinite(epoch_loss)) throw NumericalError("fit_mlp: non-finite loss at epoch " + std::to_string(epoch));
  }
  return model;
}

}  // namespace hatestack
