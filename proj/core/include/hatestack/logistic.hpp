#pragma once

#include <span>

#include "hatestack/binary_model.hpp"
#include "hatestack/linalg.hpp"

namespace hatestack {

struct LogisticParams {
  double l2 = 1e-3;
  int epochs = 1000;
  double learning_rate = 1.0;
  double grad_tolerance = 1e-6;
};

class LogisticModel final : public BinaryModel {
 public:
  LogisticModel(Vector weights, double bias) : weights_(std::move(weights)), bias_(bias) {}

  std::string_view kind() const noexcept override { return "logistic"; }
  int input_dim() const noexcept override { return static_cast<int>(weights_.size()); }
  double predict_prob(std::span<const double> x) const override;
  Envelope to_envelope() const override;
  static LogisticModel from_envelope(const Envelope& e);

  const Vector& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }

 private:
  Vector weights_;
  double bias_;
};

/// Mean log-loss plus (l2/2)|w|^2 (bias unpenalized). When the gradient
/// outputs are non-null they receive the analytic gradient.
double logistic_objective(const Matrix& X, std::span<const int> y, const Vector& w, double b,
                          double l2, Vector* grad_w = nullptr, double* grad_b = nullptr);

/// Full-batch gradient descent from w = 0, b = logit(class rate). The step
/// is min(learning_rate, 1/L) with L the curvature bound
/// lambda_max(X^T X / n) / 4 + l2, so every step decreases the objective.
/// Stops when the gradient norm drops below grad_tolerance or after
/// `epochs`. Throws NumericalError on a non-finite objective.
LogisticModel fit_logistic(const Matrix& X, std::span<const int> y, const LogisticParams& params = {});

}  // namespace hatestack
