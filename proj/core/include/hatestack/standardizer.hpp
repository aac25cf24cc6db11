#pragma once

#include <span>
#include <vector>

#include "hatestack/linalg.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

/// Near-zero-variance thresholds: a column is dropped when the ratio of its
/// most frequent value count to the second most frequent exceeds
/// `freq_ratio` AND its distinct-value fraction is below `unique_fraction`.
/// Constant columns are always dropped.
struct NzvOptions {
  double freq_ratio = 19.0;  // 95/5
  double unique_fraction = 0.1;
};

class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(int input_dim, std::vector<int> kept, Vector means, Vector scales);

  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept { return static_cast<int>(kept_.size()); }
  const std::vector<int>& kept_columns() const noexcept { return kept_; }
  const Vector& means() const noexcept { return means_; }
  const Vector& scales() const noexcept { return scales_; }

  Vector transform(std::span<const double> x) const;
  Matrix transform(const Matrix& X) const;

  Envelope to_envelope() const;
  static Standardizer from_envelope(const Envelope& e);

 private:
  int input_dim_ = 0;
  std::vector<int> kept_;
  Vector means_;
  Vector scales_;
};

/// True when the column would be removed by the near-zero-variance rule.
bool is_near_zero_variance(std::span<const double> column, const NzvOptions& options = {});

/// Keeps the non-NZV columns and records their mean and sample standard
/// deviation (n - 1). Throws DataError when n < 2 or every column is dropped.
Standardizer fit_standardizer(const Matrix& X, const NzvOptions& options = {});

}  // namespace hatestack
