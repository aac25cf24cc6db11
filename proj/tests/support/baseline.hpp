#pragma once

#include <span>
#include <vector>

#include "hatestack/corpus.hpp"
#include "hatestack/linalg.hpp"
#include "hatestack/logistic.hpp"

namespace hatestack::baseline {

/// Unordered one-vs-rest logistic classifier: one model per class, the
/// prediction is the class with the largest score.
class OneVsRest {
 public:
  static OneVsRest fit(const Matrix& X, std::span<const Severity> labels, const LogisticParams& params = {});
  Severity predict(std::span<const double> x) const;

 private:
  std::vector<LogisticModel> models_;
};

}  // namespace hatestack::baseline
