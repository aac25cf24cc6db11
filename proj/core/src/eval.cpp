#include "hatestack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "hatestack/error.hpp"

namespace hatestack {

std::string_view to_string(AbstainMode mode) noexcept {
  return mode == AbstainMode::AsError ? "as_error" : "excluded";
}

AbstainMode parse_abstain_mode(std::string_view name) {
  if (name == "as_error") return AbstainMode::AsError;
  if (name == "excluded") return AbstainMode::Excluded;
  throw UsageError("unknown abstain mode '" + std::string(name) + "' (expected as_error or excluded)");
}

std::size_t ConfusionMatrix::abstention_count() const noexcept {
  return std::accumulate(abstained.begin(), abstained.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::row_total(int t) const noexcept {
  const auto& row = counts[static_cast<std::size_t>(t)];
  std::size_t s = std::accumulate(row.begin(), row.end(), std::size_t{0});
  if (mode == AbstainMode::AsError) s += abstained[static_cast<std::size_t>(t)];
  return s;
}

std::size_t ConfusionMatrix::column_total(int p) const noexcept {
  std::size_t s = 0;
  for (const auto& row : counts) s += row[static_cast<std::size_t>(p)];
  return s;
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t s = 0;
  for (int c = 0; c < kNumClasses; ++c) s += counts[c][c];
  return s;
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t s = 0;
  for (int c = 0; c < kNumClasses; ++c) s += row_total(c);
  return s;
}

ConfusionMatrix confusion(std::span<const std::optional<Severity>> preds, std::span<const Severity> truth,
                          AbstainMode mode) {
  if (preds.size() != truth.size()) {
    throw DataError("confusion: " + std::to_string(preds.size()) + " predictions for " +
                    std::to_string(truth.size()) + " labels");
  }
  ConfusionMatrix cm;
  cm.mode = mode;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto t = static_cast<std::size_t>(code(truth[i]));
    if (preds[i]) {
      ++cm.counts[t][static_cast<std::size_t>(code(*preds[i]))];
    } else {
      ++cm.abstained[t];
    }
  }
  return cm;
}

ConfusionMatrix confusion(std::span<const Decision> preds, std::span<const Severity> truth, AbstainMode mode) {
  std::vector<std::optional<Severity>> labels;
  labels.reserve(preds.size());
  for (const auto& d : preds) labels.push_back(d.abstained ? std::nullopt : std::optional(d.label));
  return confusion(labels, truth, mode);
}

OrdinalErrorRates ordinal_errors(const ConfusionMatrix& cm) {
  OrdinalErrorRates r;
  const auto clean_row = cm.row_total(0);
  const auto hate_row = cm.row_total(2);
  if (clean_row > 0) r.clean_as_hate_rate = static_cast<double>(cm.counts[0][2]) / static_cast<double>(clean_row);
  if (hate_row > 0) r.hate_as_clean_rate = static_cast<double>(cm.counts[2][0]) / static_cast<double>(hate_row);
  std::size_t errors = 0, minor = 0;
  for (int t = 0; t < kNumClasses; ++t) {
    for (int p = 0; p < kNumClasses; ++p) {
      if (t == p) continue;
      errors += cm.counts[t][p];
      if (std::abs(t - p) == 1) minor += cm.counts[t][p];
    }
  }
  if (errors > 0) r.minor_error_rate = static_cast<double>(minor) / static_cast<double>(errors);
  return r;
}

EvalReport class_metrics(const ConfusionMatrix& cm) {
  EvalReport r;
  r.mode = cm.mode;
  r.confusion = cm;
  r.n = cm.total();
  r.abstentions = cm.abstention_count();
  if (r.n == 0) throw DataError("class_metrics: empty confusion matrix");
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(r.n);
  r.accuracy_half_width = 1.96 * std::sqrt(r.accuracy * (1.0 - r.accuracy) / static_cast<double>(r.n));
  double f1_sum = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    ClassMetrics& m = r.per_class[c];
    const double diag = static_cast<double>(cm.counts[c][c]);
    const auto col = cm.column_total(c);
    const auto row = cm.row_total(c);
    m.support = row;
    if (col == 0) {
      m.precision_undefined = true;
    } else {
      m.precision = diag / static_cast<double>(col);
    }
    if (row == 0) {
      m.recall_undefined = true;
    } else {
      m.recall = diag / static_cast<double>(row);
    }
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    f1_sum += m.f1;
  }
  r.macro_f1 = f1_sum / kNumClasses;
  r.ordinal = ordinal_errors(cm);
  return r;
}

std::optional<double> binary_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw DataError("binary_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1) / 2.0) / (np * static_cast<double>(n_neg));
}

std::array<std::optional<double>, kNumClasses> roc_auc_ovr(std::span<const SeverityDistribution> probs,
                                                          std::span<const Severity> truth) {
  if (probs.size() != truth.size()) throw DataError("roc_auc_ovr: length mismatch");
  std::array<std::optional<double>, kNumClasses> out;
  std::vector<double> scores(probs.size());
  const auto positive = std::make_unique<bool[]>(probs.size());
  for (int c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < probs.size(); ++i) {
      scores[i] = probs[i].as_array()[static_cast<std::size_t>(c)];
      positive[i] = code(truth[i]) == c;
    }
    out[static_cast<std::size_t>(c)] = binary_auc(scores, std::span<const bool>(positive.get(), probs.size()));
  }
  return out;
}

EvalReport evaluate(std::span<const Prediction> preds, std::span<const Severity> truth, AbstainMode mode) {
  std::vector<Decision> decisions;
  std::vector<SeverityDistribution> dists;
  for (const auto& p : preds) {
    decisions.push_back(p.decision);
    dists.push_back(p.dist);
  }
  EvalReport r = class_metrics(confusion(decisions, truth, mode));
  const auto auc = roc_auc_ovr(dists, truth);
  for (int c = 0; c < kNumClasses; ++c) r.per_class[c].auc = auc[c];
  return r;
}

Json EvalReport::to_json() const {
  Json classes = Json::object();
  for (Severity s : kAllSeverities) {
    const auto& m = per_class[code(s)];
    classes[std::string(to_string(s))] = Json{{"precision", m.precision},
                                              {"recall", m.recall},
                                              {"f1", m.f1},
                                              {"support", m.support},
                                              {"precision_undefined", m.precision_undefined},
                                              {"recall_undefined", m.recall_undefined},
                                              {"auc", m.auc ? Json(*m.auc) : Json(nullptr)}};
  }
  Json matrix = Json::array();
  for (const auto& row : confusion.counts) matrix.push_back(row);
  return Json{{"n", n},
              {"abstentions", abstentions},
              {"abstain_mode", std::string(to_string(mode))},
              {"accuracy", accuracy},
              {"accuracy_half_width", accuracy_half_width},
              {"macro_f1", macro_f1},
              {"classes", classes},
              {"clean_as_hate_rate", ordinal.clean_as_hate_rate},
              {"hate_as_clean_rate", ordinal.hate_as_clean_rate},
              {"minor_error_rate", ordinal.minor_error_rate},
              {"confusion", matrix},
              {"abstained_by_class", confusion.abstained}};
}

namespace {

void check_codes(std::span<const int> a, std::span<const int> b, int k) {
  if (a.size() != b.size()) throw DataError("agreement: coder lists differ in length");
  if (a.empty()) throw DataError("agreement: no items");
  if (k < 1) throw UsageError("agreement: need at least one category");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= k || b[i] < 0 || b[i] >= k) {
      throw DataError("agreement: code out of range at item " + std::to_string(i));
    }
  }
}

}  // namespace

double cohen_kappa(std::span<const int> a, std::span<const int> b, int k) {
  check_codes(a, b, k);
  const double n = static_cast<double>(a.size());
  std::vector<double> ma(static_cast<std::size_t>(k)), mb(static_cast<std::size_t>(k));
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[static_cast<std::size_t>(a[i])] += 1;
    mb[static_cast<std::size_t>(b[i])] += 1;
    agree += a[i] == b[i];
  }
  const double po = agree / n;
  double pe = 0;
  for (int c = 0; c < k; ++c) pe += (ma[c] / n) * (mb[c] / n);
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

double krippendorff_alpha(std::span<const int> a, std::span<const int> b, int k, AlphaMetric metric) {
  check_codes(a, b, k);
  const auto K = static_cast<std::size_t>(k);
  std::vector<std::vector<double>> o(K, std::vector<double>(K, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    o[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1;
    o[static_cast<std::size_t>(b[i])][static_cast<std::size_t>(a[i])] += 1;
  }
  std::vector<double> nc(K, 0.0);
  double n = 0;
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t j = 0; j < K; ++j) nc[c] += o[c][j];
    n += nc[c];
  }
  auto delta2 = [&](std::size_t c, std::size_t j) {
    if (c == j) return 0.0;
    if (metric == AlphaMetric::Nominal) return 1.0;
    const std::size_t lo = std::min(c, j), hi = std::max(c, j);
    double s = 0;
    for (std::size_t g = lo; g <= hi; ++g) s += nc[g];
    s -= (nc[lo] + nc[hi]) / 2.0;
    return s * s;
  };
  double observed = 0, expected = 0;
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t j = 0; j < K; ++j) {
      const double d = delta2(c, j);
      observed += o[c][j] * d;
      expected += nc[c] * nc[j] * d;
    }
  }
  if (expected == 0) return 1.0;
  return 1.0 - (n - 1.0) * observed / expected;
}

AgreementReport agreement(std::span<const int> a, std::span<const int> b, int k) {
  check_codes(a, b, k);
  AgreementReport r;
  r.n = a.size();
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
  r.percent_agreement = static_cast<double>(agree) / static_cast<double>(a.size());
  r.cohen_kappa = cohen_kappa(a, b, k);
  r.krippendorff_alpha_ordinal = krippendorff_alpha(a, b, k, AlphaMetric::Ordinal);
  return r;
}

AgreementReport agreement(std::span<const Severity> a, std::span<const Severity> b) {
  std::vector<int> ca, cb;
  for (Severity s : a) ca.push_back(code(s));
  for (Severity s : b) cb.push_back(code(s));
  return agreement(ca, cb, kNumClasses);
}

Json AgreementReport::to_json() const {
  return Json{{"n", n},
              {"percent_agreement", percent_agreement},
              {"cohen_kappa", cohen_kappa},
              {"krippendorff_alpha_ordinal", krippendorff_alpha_ordinal}};
}

}  // namespace hatestack
