#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string_view>

#include "hatestack/serialize.hpp"

namespace hatestack {

/// A fitted probabilistic binary classifier. predict_prob returns
/// P(y = 1 | x) in [0, 1] and throws DataError on a dimension mismatch.
class BinaryModel {
 public:
  virtual ~BinaryModel() = default;
  virtual std::string_view kind() const noexcept = 0;
  virtual int input_dim() const noexcept = 0;
  virtual double predict_prob(std::span<const double> x) const = 0;
  virtual Envelope to_envelope() const = 0;
};

/// Dispatches on the envelope kind ("logistic" | "gbt").
std::shared_ptr<const BinaryModel> binary_model_from_envelope(const Envelope& e);

inline double sigmoid(double z) {
  if (z >= 0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace hatestack
