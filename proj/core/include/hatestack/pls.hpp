#pragma once

#include <span>

#include "hatestack/linalg.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

/// Fitted PLS2 reduction: x -> ((x - mean) / scale)^T W (P^T W)^-1.
class PlsModel {
 public:
  PlsModel() = default;
  PlsModel(Matrix weights, Matrix loadings, Vector x_mean, Vector x_scale, int fitted_on);

  int n_components() const noexcept { return static_cast<int>(weights_.cols()); }
  int input_dim() const noexcept { return static_cast<int>(weights_.rows()); }
  int fitted_on() const noexcept { return fitted_on_; }
  const Matrix& weights() const noexcept { return weights_; }
  const Matrix& loadings() const noexcept { return loadings_; }
  const Matrix& rotation() const noexcept { return rotation_; }
  const Vector& x_mean() const noexcept { return x_mean_; }
  const Vector& x_scale() const noexcept { return x_scale_; }

  /// Throws DataError on a length mismatch.
  Vector transform(std::span<const double> x) const;
  Matrix transform(const Matrix& X) const;

  Envelope to_envelope() const;
  static PlsModel from_envelope(const Envelope& e);

 private:
  Matrix weights_;   // d x k
  Matrix loadings_;  // d x k
  Matrix rotation_;  // d x k
  Vector x_mean_;
  Vector x_scale_;
  int fitted_on_ = 0;
};

struct PlsOptions {
  int max_iterations = 500;
  double tolerance = 1e-10;
  /// Stop with fewer components (instead of throwing) once X or Y has no
  /// covariance left to extract.
  bool allow_fewer = false;
};

struct PlsFit {
  PlsModel model;
  Matrix train_scores;  // n x k, columns mutually orthogonal
  Matrix x_residual;    // deflated, standardized X after the last component
};

/// NIPALS PLS2 on column-standardized X (constant columns get scale 1)
/// against centered Y. The inner loop starts from the dominant eigenvector
/// of Y^T X X^T Y and iterates until the score vector changes by less than
/// `tolerance` (relative). A change that has stopped shrinking for 10
/// iterations is also accepted once it is below the rounding floor
/// 64 eps |C_1| / |C_a|, where C_a = X_a^T Y is the covariance left at
/// component a. Throws NumericalError naming the component on
/// non-convergence or exhaustion.
PlsFit fit_pls(const Matrix& X, const Matrix& Y, int k, const PlsOptions& options = {});

}  // namespace hatestack
