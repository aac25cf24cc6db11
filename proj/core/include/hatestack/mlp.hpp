#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "hatestack/linalg.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

enum class Activation { Tanh, Relu };

struct MlpParams {
  int hidden = 16;
  int epochs = 200;
  double learning_rate = 0.05;
  double l2 = 1e-4;
  int batch_size = 32;
  std::uint64_t seed = 0;
  Activation activation = Activation::Tanh;
};

/// One hidden layer, softmax over three classes.
class MlpModel {
 public:
  using Probs = std::array<double, 3>;

  MlpModel() = default;
  MlpModel(Matrix w1, Vector b1, Matrix w2, Vector b2, Activation activation);

  int input_dim() const noexcept { return static_cast<int>(w1_.cols()); }
  int hidden() const noexcept { return static_cast<int>(w1_.rows()); }
  Activation activation() const noexcept { return activation_; }

  /// Softmax probabilities; throws DataError on a dimension mismatch.
  Probs predict(std::span<const double> x) const;

  const Matrix& w1() const noexcept { return w1_; }
  const Vector& b1() const noexcept { return b1_; }
  const Matrix& w2() const noexcept { return w2_; }
  const Vector& b2() const noexcept { return b2_; }
  Matrix& w1() noexcept { return w1_; }
  Vector& b1() noexcept { return b1_; }
  Matrix& w2() noexcept { return w2_; }
  Vector& b2() noexcept { return b2_; }

  Envelope to_envelope() const;
  static MlpModel from_envelope(const Envelope& e);

 private:
  Matrix w1_;  // hidden x d
  Vector b1_;
  Matrix w2_;  // 3 x hidden
  Vector b2_;
  Activation activation_ = Activation::Tanh;
};

struct MlpGradient {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
};

/// Mean cross-entropy over the given rows plus (l2/2)(|W1|^2 + |W2|^2).
/// Fills `grad` with the backpropagated gradient when non-null.
double mlp_objective(const MlpModel& model, const Matrix& X, std::span<const int> y, double l2,
                     MlpGradient* grad = nullptr);

/// Mini-batch gradient descent with a seeded shuffle each epoch and
/// Glorot-uniform initialization. Throws NumericalError on a non-finite
/// loss.
MlpModel fit_mlp(const Matrix& X, std::span<const int> y, const MlpParams& params = {});

}  // namespace hatestack
