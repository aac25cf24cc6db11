#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hatestack/corpus.hpp"
#include "hatestack/ordinal.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

/// as_error: an abstention stays in its true class's row total (so it
/// lowers accuracy and recall) but lands in no predicted column.
/// excluded: abstentions are only counted.
enum class AbstainMode { AsError, Excluded };

std::string_view to_string(AbstainMode mode) noexcept;
/// "as_error" | "excluded"; throws UsageError otherwise.
AbstainMode parse_abstain_mode(std::string_view name);

struct ConfusionMatrix {
  /// counts[true][predicted]
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};
  /// Abstentions by true class.
  std::array<std::size_t, kNumClasses> abstained{};
  AbstainMode mode = AbstainMode::AsError;

  std::size_t abstention_count() const noexcept;
  std::size_t row_total(int true_class) const noexcept;
  std::size_t column_total(int predicted_class) const noexcept;
  std::size_t trace() const noexcept;
  /// Denominator for accuracy: all rows, abstentions included in as_error.
  std::size_t total() const noexcept;
};

/// A prediction is a label or nullopt for an abstention. Throws DataError
/// on a length mismatch.
ConfusionMatrix confusion(std::span<const std::optional<Severity>> preds, std::span<const Severity> truth,
                          AbstainMode mode = AbstainMode::AsError);
ConfusionMatrix confusion(std::span<const Decision> preds, std::span<const Severity> truth,
                          AbstainMode mode = AbstainMode::AsError);

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  std::optional<double> auc;
};

struct OrdinalErrorRates {
  double clean_as_hate_rate = 0;
  double hate_as_clean_rate = 0;
  /// Adjacent-class errors over all errors; 0 when there are no errors.
  double minor_error_rate = 0;
};

OrdinalErrorRates ordinal_errors(const ConfusionMatrix& cm);

struct EvalReport {
  std::size_t n = 0;
  std::size_t abstentions = 0;
  AbstainMode mode = AbstainMode::AsError;
  double accuracy = 0;
  /// 1.96 * sqrt(acc (1 - acc) / n)
  double accuracy_half_width = 0;
  std::array<ClassMetrics, kNumClasses> per_class{};
  double macro_f1 = 0;
  OrdinalErrorRates ordinal;
  ConfusionMatrix confusion;

  Json to_json() const;
};

/// precision = diag / column, recall = diag / row, zero denominators give 0
/// and set the matching flag. Throws DataError on an empty matrix.
EvalReport class_metrics(const ConfusionMatrix& cm);

/// One-vs-rest AUC per class from the Mann-Whitney statistic with midranks
/// for ties; nullopt when the class or its complement is absent.
std::array<std::optional<double>, kNumClasses> roc_auc_ovr(std::span<const SeverityDistribution> probs,
                                                          std::span<const Severity> truth);

/// Area under the ROC of `scores` for the positives flagged in `positive`.
std::optional<double> binary_auc(std::span<const double> scores, std::span<const bool> positive);

/// Confusion, class metrics and AUCs of a list of predictions.
EvalReport evaluate(std::span<const Prediction> preds, std::span<const Severity> truth,
                    AbstainMode mode = AbstainMode::AsError);

struct AgreementReport {
  std::size_t n = 0;
  double percent_agreement = 0;
  double cohen_kappa = 0;
  double krippendorff_alpha_ordinal = 0;

  Json to_json() const;
};

enum class AlphaMetric { Nominal, Ordinal };

/// Two-coder Krippendorff alpha over categories 0..k-1 from the coincidence
/// matrix. 1 when the expected disagreement is zero.
double krippendorff_alpha(std::span<const int> a, std::span<const int> b, int k, AlphaMetric metric);

/// (p_o - p_e) / (1 - p_e) with p_e from the marginal products; 1 when
/// p_e = 1.
double cohen_kappa(std::span<const int> a, std::span<const int> b, int k);

/// Codes must lie in [0, k). Throws DataError when n = 0 or the lengths
/// differ.
AgreementReport agreement(std::span<const int> a, std::span<const int> b, int k);
AgreementReport agreement(std::span<const Severity> a, std::span<const Severity> b);

}  // namespace hatestack
