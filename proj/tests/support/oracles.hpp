#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hatestack/corpus.hpp"
#include "hatestack/eval.hpp"
#include "hatestack/log_odds.hpp"

// Independent reference implementations used only by tests. Each one is the
// plainest textbook form, written without reusing library code paths.
namespace hatestack::oracle {

/// Informative-Dirichlet weighted log-odds z-score of `noun` for `cls`
/// against the other two classes, counted token by token over the raw
/// documents.
double dirichlet_log_odds_z(std::span<const NounDocument> docs, const std::string& noun, Severity cls,
                            double prior_scale);

/// AUC as the share of (positive, negative) pairs ranked correctly, ties 1/2.
std::optional<double> auc_pairs(std::span<const double> scores, const std::vector<bool>& positive);

/// Cohen's kappa from a k x k contingency table.
double kappa_from_table(const std::vector<std::vector<double>>& table);

/// Two-coder Krippendorff alpha from all pairs of pooled values:
/// 1 - D_o / D_e with D_o the mean within-unit distance and D_e the mean
/// distance over every ordered pair of distinct pooled values.
double alpha_pairwise(std::span<const int> a, std::span<const int> b, int k, bool ordinal);

struct Tally {
  double accuracy = 0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  std::size_t abstentions = 0;
  std::size_t n = 0;
};

/// Metrics from raw (prediction, truth) pairs.
Tally tally(std::span<const std::optional<Severity>> preds, std::span<const Severity> truth, AbstainMode mode);

/// Central differences of f at x with step h.
std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h = 1e-6);

}  // namespace hatestack::oracle
