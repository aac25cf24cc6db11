#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hatestack/corpus.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

/// The plural nouns of one training message and its label.
struct NounDocument {
  std::vector<std::string> nouns;
  Severity label = Severity::Clean;
};

/// Per-noun, per-class z-scored weighted log-odds (log-odds ratio with an
/// informative Dirichlet prior, one class against the other two).
class LogOddsModel {
 public:
  using Scores = std::array<double, kNumClasses>;

  LogOddsModel() = default;
  LogOddsModel(double prior_scale, std::map<std::string, Scores> zscores)
      : prior_scale_(prior_scale), zscores_(std::move(zscores)) {}

  double prior_scale() const noexcept { return prior_scale_; }
  const std::map<std::string, Scores>& zscores() const noexcept { return zscores_; }
  bool empty() const noexcept { return zscores_.empty(); }

  /// Per-class sums of the z-scores of the given nouns; unseen nouns add 0.
  Scores features(std::span<const std::string> nouns) const;

  Envelope to_envelope() const;
  static LogOddsModel from_envelope(const Envelope& e);

 private:
  double prior_scale_ = 1.0;
  std::map<std::string, Scores> zscores_;
};

/// With y_wi the count of noun w in class i, n_i the class total, y_w and n
/// the corpus totals, and alpha_w = prior_scale * y_w / n (so the alphas sum
/// to prior_scale = alpha_0):
///
///   delta = log[(y_wi + a_w) / (n_i + a_0 - y_wi - a_w)]
///         - log[(y_w - y_wi + a_w) / (n - n_i + a_0 - y_w + y_wi - a_w)]
///   z     = delta / sqrt(1/(y_wi + a_w) + 1/(y_w - y_wi + a_w))
///
/// A (noun, class) pair whose odds are undefined (a non-positive
/// denominator, only possible with a one-noun vocabulary) scores 0.
/// Throws DataError unless every class has at least one document.
LogOddsModel fit_weighted_log_odds(std::span<const NounDocument> docs, double prior_scale = 1.0);

}  // namespace hatestack
