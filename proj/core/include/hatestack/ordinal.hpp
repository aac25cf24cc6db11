#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "hatestack/binary_model.hpp"
#include "hatestack/corpus.hpp"
#include "hatestack/gbt.hpp"
#include "hatestack/linalg.hpp"
#include "hatestack/logistic.hpp"

namespace hatestack {

inline constexpr double kDefaultAbstainThreshold = 1.0 / 3.0;

struct SeverityDistribution {
  double p_clean = 1;
  double p_offensive = 0;
  double p_hate = 0;

  std::array<double, kNumClasses> as_array() const { return {p_clean, p_offensive, p_hate}; }
  static SeverityDistribution from_array(const std::array<double, kNumClasses>& p) { return {p[0], p[1], p[2]}; }
};

struct Decision {
  Severity label = Severity::Clean;
  bool abstained = false;
};

/// (1 - p_not_clean, p_not_clean - p_hate, p_hate). A negative middle term
/// is set to 0 and the triple renormalized; otherwise the values are
/// returned as computed. Inputs are clipped to [0, 1].
SeverityDistribution combine_probs(double p_not_clean, double p_hate);

/// Argmax with ties going to the less severe class; abstains when the
/// largest component is strictly below `abstain_threshold`.
Decision decide(const SeverityDistribution& dist, double abstain_threshold = kDefaultAbstainThreshold);

enum class LearnerKind { Logistic, Gbt };

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Gbt;
  LogisticParams logistic;
  GbtParams gbt;
  /// Select GBT parameters by grid search before the final fit.
  bool tune = false;
  int tune_folds = 3;
  std::uint64_t seed = 0;
};

std::string to_string(LearnerKind kind);
/// "logistic" | "gbt"; throws UsageError otherwise.
LearnerKind parse_learner_kind(std::string_view name);

std::shared_ptr<const BinaryModel> fit_binary(const Matrix& X, std::span<const int> y, const LearnerConfig& config);

class OrdinalClassifier {
 public:
  OrdinalClassifier(std::shared_ptr<const BinaryModel> not_clean, std::shared_ptr<const BinaryModel> hate,
                    double abstain_threshold = kDefaultAbstainThreshold);

  const BinaryModel& clf_not_clean() const noexcept { return *not_clean_; }
  const BinaryModel& clf_hate() const noexcept { return *hate_; }
  double abstain_threshold() const noexcept { return threshold_; }
  int input_dim() const noexcept { return not_clean_->input_dim(); }

  SeverityDistribution predict(std::span<const double> x) const;

 private:
  std::shared_ptr<const BinaryModel> not_clean_;
  std::shared_ptr<const BinaryModel> hate_;
  double threshold_;
};

/// Targets: not_clean = (label >= Offensive), hate = (label == Hate).
std::array<int, 2> ordinal_targets(Severity s) noexcept;

/// Both binary models on the same matrix. Throws DataError unless every
/// class occurs in `labels`.
OrdinalClassifier fit_ordinal(const Matrix& X, std::span<const Severity> labels, const LearnerConfig& config,
                              double abstain_threshold = kDefaultAbstainThreshold);

struct Prediction {
  SeverityDistribution dist;
  Decision decision;
};

Prediction predict_ordinal(const OrdinalClassifier& oc, std::span<const double> x);

struct GbtGridResult {
  GbtParams best;
  double best_f1 = -1;
};

/// Exhaustive search over max_depth {2,3,4} x n_trees {50,100,200} x
/// learning_rate {0.05,0.1,0.3}, scored by mean inner-fold hate-class F1 of
/// the ordinal classifier. Ties keep the earlier grid point.
GbtGridResult tune_gbt(const Matrix& X, std::span<const Severity> labels, const GbtParams& base, int folds,
                       std::uint64_t seed);

}  // namespace hatestack
