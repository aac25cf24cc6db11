#include "hatestack/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "hatestack/error.hpp"

namespace hatestack {

namespace {

/// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double largest_eigenvalue_gram(const Matrix& X) {
  if (X.rows() == 0 || X.cols() == 0) return 0.0;
  Vector v = Vector::Ones(X.cols()) / std::sqrt(static_cast<double>(X.cols()));
  double lambda = 0;
  for (int it = 0; it < 50; ++it) {
    Vector xv = X * v;
    Vector next = X.transpose() * xv / static_cast<double>(X.rows());
    const double norm = next.norm();
    if (!(norm > 0)) return 0.0;
    lambda = norm;
    v = next / norm;
  }
  return lambda;
}

}  // namespace

double LogisticModel::predict_prob(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw DataError("logistic: expected " + std::to_string(input_dim()) + " features, got " +
                    std::to_string(x.size()));
  }
  return sigmoid(weights_.dot(as_vector(x)) + bias_);
}

Envelope LogisticModel::to_envelope() const {
  Envelope e;
  e.kind = "logistic";
  e.params = Json{{"input_dim", input_dim()}};
  e.arrays["weights"] = std::vector<double>(weights_.begin(), weights_.end());
  e.arrays["bias"] = {bias_};
  return e;
}

LogisticModel LogisticModel::from_envelope(const Envelope& e) {
  e.expect("logistic", 1);
  const auto& w = e.array("weights");
  const auto& b = e.array("bias");
  if (b.size() != 1 || static_cast<int>(w.size()) != e.params.at("input_dim").get<int>()) {
    throw DataError("logistic envelope: size mismatch");
  }
  return LogisticModel(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())), b[0]);
}

double logistic_objective(const Matrix& X, std::span<const int> y, const Vector& w, double b, double l2,
                          Vector* grad_w, double* grad_b) {
  const Eigen::Index n = X.rows();
  const Vector z = (X * w).array() + b;
  double loss = 0;
  Vector resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += softplus(z(i)) - (y[i] ? z(i) : 0.0);
    resid(i) = sigmoid(z(i)) - y[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss = loss * inv_n + 0.5 * l2 * w.squaredNorm();
  if (grad_w) *grad_w = X.transpose() * resid * inv_n + l2 * w;
  if (grad_b) *grad_b = resid.sum() * inv_n;
  return loss;
}

LogisticModel fit_logistic(const Matrix& X, std::span<const int> y, const LogisticParams& params) {
  if (X.rows() == 0) throw DataError("fit_logistic: empty training set");
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) throw DataError("fit_logistic: label count mismatch");
  double rate = 0;
  for (int v : y) rate += v;
  rate = std::clamp(rate / static_cast<double>(y.size()), 1e-6, 1.0 - 1e-6);

  Vector w = Vector::Zero(X.cols());
  double b = std::log(rate / (1.0 - rate));
  const double curvature = 0.25 * largest_eigenvalue_gram(X) * 1.05 + params.l2;
  // the intercept direction adds at most 1/4 to the bound
  const double step = std::min(params.learning_rate, 1.0 / (curvature + 0.25));

  Vector gw;
  double gb = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const double loss = logistic_objective(X, y, w, b, params.l2, &gw, &gb);
    if (!std::isfinite(loss)) {
      throw NumericalError("fit_logistic: non-finite loss at epoch " + std::to_string(epoch));
    }
    if (std::sqrt(gw.squaredNorm() + gb * gb) < params.grad_tolerance) break;
    w -= step * gw;
    b -= step * gb;
  }
  return LogisticModel(std::move(w), b);
}

}  // namespace hatestack
