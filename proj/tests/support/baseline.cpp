#include "baseline.hpp"

namespace hatestack::baseline {

OneVsRest OneVsRest::fit(const Matrix& X, std::span<const Severity> labels, const LogisticParams& params) {
  OneVsRest out;
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = code(labels[i]) == c ? 1 : 0;
    out.models_.push_back(fit_logistic(X, y, params));
  }
  return out;
}

Severity OneVsRest::predict(std::span<const double> x) const {
  int best = 0;
  double best_p = -1;
  for (int c = 0; c < kNumClasses; ++c) {
    const double p = models_[c].predict_prob(x);
    if (p > best_p) {
      best_p = p;
      best = c;
    }
  }
  return severity_from_code(best);
}

}  // namespace hatestack::baseline
