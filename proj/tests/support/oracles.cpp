#include "oracles.hpp"

#include <cmath>
#include <map>

namespace hatestack::oracle {

double dirichlet_log_odds_z(std::span<const NounDocument> docs, const std::string& noun, Severity cls, double prior_scale) {
  double y_wi = 0, y_wj = 0, n_i = 0, n_j = 0;
  for (const auto& d : docs) {
    for (const auto& w : d.nouns) {
      const bool in_class = d.label == cls;
      (in_class ? n_i : n_j) += 1;
      if (w == noun) (in_class ? y_wi : y_wj) += 1;
    }
  }
  const double n = n_i + n_j;
  const double a0 = prior_scale;
  const double aw = prior_scale * (y_wi + y_wj) / n;
  const double odds_i = (y_wi + aw) / (n_i + a0 - y_wi - aw);
  const double odds_j = (y_wj + aw) / (n_j + a0 - y_wj - aw);
  const double delta = std::log(odds_i) - std::log(odds_j);
  const double var = 1.0 / (y_wi + aw) + 1.0 / (y_wj + aw);
  return delta / std::sqrt(var);
}

std::optional<double> auc_pairs(std::span<const double> scores, const std::vector<bool>& positive) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  if (pairs == 0) return std::nullopt;
  return wins / pairs;
}

double kappa_from_table(const std::vector<std::vector<double>>& table) {
  const std::size_t k = table.size();
  double n = 0, agree = 0;
  std::vector<double> rows(k, 0), cols(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      n += table[i][j];
      rows[i] += table[i][j];
      cols[j] += table[i][j];
    }
    agree += table[i][i];
  }
  const double po = agree / n;
  double pe = 0;
  for (std::size_t i = 0; i < k; ++i) pe += (rows[i] / n) * (cols[i] / n);
  if (pe == 1) return 1;
  return (po - pe) / (1 - pe);
}

double alpha_pairwise(std::span<const int> a, std::span<const int> b, int k, bool ordinal) {
  std::vector<int> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> freq(k, 0);
  for (int v : pooled) freq[v] += 1;
  auto delta2 = [&](int c, int d) -> double {
    if (c == d) return 0;
    if (!ordinal) return 1;
    const int lo = std::min(c, d), hi = std::max(c, d);
    double s = 0;
    for (int g = lo; g <= hi; ++g) s += freq[g];
    s -= (freq[lo] + freq[hi]) / 2;
    return s * s;
  };
  double d_o = 0;
  for (std::size_t u = 0; u < a.size(); ++u) d_o += delta2(a[u], b[u]);
  d_o /= static_cast<double>(a.size());
  double d_e = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = 0; j < pooled.size(); ++j) {
      if (i != j) d_e += delta2(pooled[i], pooled[j]);
    }
  }
  const double m = static_cast<double>(pooled.size());
  d_e /= m * (m - 1);
  if (d_e == 0) return 1;
  return 1 - d_o / d_e;
}

Tally tally(std::span<const std::optional<Severity>> preds, std::span<const Severity> truth, AbstainMode mode) {
  Tally t;
  std::array<double, kNumClasses> tp{}, pred_count{}, true_count{};
  double correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!preds[i]) {
      ++t.abstentions;
      if (mode == AbstainMode::AsError) {
        ++t.n;
        true_count[code(truth[i])] += 1;
      }
      continue;
    }
    ++t.n;
    true_count[code(truth[i])] += 1;
    pred_count[code(*preds[i])] += 1;
    if (*preds[i] == truth[i]) {
      correct += 1;
      tp[code(truth[i])] += 1;
    }
  }
  t.accuracy = t.n ? correct / static_cast<double>(t.n) : 0;
  for (int c = 0; c < kNumClasses; ++c) {
    t.precision[c] = pred_count[c] > 0 ? tp[c] / pred_count[c] : 0;
    t.recall[c] = true_count[c] > 0 ? tp[c] / true_count[c] : 0;
    const double s = t.precision[c] + t.recall[c];
    t.f1[c] = s > 0 ? 2 * t.precision[c] * t.recall[c] / s : 0;
  }
  return t;
}

std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace hatestack::oracle
