#include "hatestack/standardizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hatestack/error.hpp"

namespace hatestack {

Standardizer::Standardizer(int input_dim, std::vector<int> kept, Vector means, Vector scales)
    : input_dim_(input_dim), kept_(std::move(kept)), means_(std::move(means)), scales_(std::move(scales)) {}

Vector Standardizer::transform(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw DataError("standardizer: expected " + std::to_string(input_dim_) + " features, got " +
                    std::to_string(x.size()));
  }
  Vector out(output_dim());
  for (int j = 0; j < output_dim(); ++j) out(j) = (x[kept_[j]] - means_(j)) / scales_(j);
  return out;
}

Matrix Standardizer::transform(const Matrix& X) const {
  if (X.cols() != input_dim_) throw DataError("standardizer: column count mismatch");
  Matrix out(X.rows(), output_dim());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (int j = 0; j < output_dim(); ++j) out(i, j) = (X(i, kept_[j]) - means_(j)) / scales_(j);
  }
  return out;
}

Envelope Standardizer::to_envelope() const {
  Envelope e;
  e.kind = "standardizer";
  e.params = Json{{"input_dim", input_dim_}, {"kept_columns", kept_}};
  e.arrays["means"] = std::vector<double>(means_.begin(), means_.end());
  e.arrays["scales"] = std::vector<double>(scales_.begin(), scales_.end());
  return e;
}

Standardizer Standardizer::from_envelope(const Envelope& e) {
  e.expect("standardizer", 1);
  auto kept = e.params.at("kept_columns").get<std::vector<int>>();
  const auto& m = e.array("means");
  const auto& s = e.array("scales");
  if (m.size() != kept.size() || s.size() != kept.size()) throw DataError("standardizer envelope: size mismatch");
  const auto k = static_cast<Eigen::Index>(kept.size());
  return Standardizer(e.params.at("input_dim").get<int>(), std::move(kept),
                      Eigen::Map<const Vector>(m.data(), k), Eigen::Map<const Vector>(s.data(), k));
}

bool is_near_zero_variance(std::span<const double> column, const NzvOptions& options) {
  std::map<double, std::size_t> freq;
  for (double v : column) ++freq[v];
  if (freq.size() <= 1) return true;
  std::size_t first = 0, second = 0;
  for (const auto& [v, c] : freq) {
    if (c > first) {
      second = first;
      first = c;
    } else if (c > second) {
      second = c;
    }
  }
  const double ratio = static_cast<double>(first) / static_cast<double>(second);
  const double unique = static_cast<double>(freq.size()) / static_cast<double>(column.size());
  return ratio > options.freq_ratio && unique < options.unique_fraction;
}

Standardizer fit_standardizer(const Matrix& X, const NzvOptions& options) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw DataError("fit_standardizer: need at least 2 rows");
  std::vector<int> kept;
  std::vector<double> means, scales;
  std::vector<double> col(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[i] = X(i, j);
    if (is_near_zero_variance(col, options)) continue;
    double mean = 0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0)) continue;
    kept.push_back(static_cast<int>(j));
    means.push_back(mean);
    scales.push_back(sd);
  }
  if (kept.empty()) throw DataError("fit_standardizer: every column was removed as near-zero-variance");
  const auto k = static_cast<Eigen::Index>(kept.size());
  return Standardizer(static_cast<int>(X.cols()), std::move(kept), Eigen::Map<const Vector>(means.data(), k),
                      Eigen::Map<const Vector>(scales.data(), k));
}

}  // namespace hatestack
