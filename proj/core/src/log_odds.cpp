#include "hatestack/log_odds.hpp"

#include <cmath>

#include "hatestack/error.hpp"

namespace hatestack {

LogOddsModel::Scores LogOddsModel::features(std::span<const std::string> nouns) const {
  Scores out{};
  for (const auto& n : nouns) {
    auto it = zscores_.find(n);
    if (it == zscores_.end()) continue;
    for (int c = 0; c < kNumClasses; ++c) out[c] += it->second[c];
  }
  return out;
}

Envelope LogOddsModel::to_envelope() const {
  Envelope e;
  e.kind = "log_odds";
  e.params["prior_scale"] = prior_scale_;
  Json vocab = Json::array();
  std::vector<double> z;
  z.reserve(zscores_.size() * kNumClasses);
  for (const auto& [noun, scores] : zscores_) {
    vocab.push_back(noun);
    z.insert(z.end(), scores.begin(), scores.end());
  }
  e.params["vocabulary"] = vocab;
  e.arrays["zscores"] = std::move(z);
  return e;
}

LogOddsModel LogOddsModel::from_envelope(const Envelope& e) {
  e.expect("log_odds", 1);
  const auto& vocab = e.params.at("vocabulary");
  const auto& z = e.array("zscores");
  if (z.size() != vocab.size() * kNumClasses) throw DataError("log_odds envelope: size mismatch");
  std::map<std::string, Scores> scores;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    scores[vocab[i].get<std::string>()] = {z[3 * i], z[3 * i + 1], z[3 * i + 2]};
  }
  return LogOddsModel(e.params.at("prior_scale").get<double>(), std::move(scores));
}

LogOddsModel fit_weighted_log_odds(std::span<const NounDocument> docs, double prior_scale) {
  if (!(prior_scale > 0)) throw UsageError("log-odds prior_scale must be positive");
  std::array<std::size_t, kNumClasses> docs_per_class{};
  std::map<std::string, std::array<double, kNumClasses>> counts;
  std::array<double, kNumClasses> class_total{};
  for (const auto& d : docs) {
    const int c = code(d.label);
    ++docs_per_class[c];
    for (const auto& noun : d.nouns) {
      counts[noun][c] += 1.0;
      class_total[c] += 1.0;
    }
  }
  for (Severity s : kAllSeverities) {
    if (docs_per_class[code(s)] == 0) {
      throw DataError("log-odds fit: no documents of class '" + std::string(to_string(s)) + "'");
    }
  }
  const double total = class_total[0] + class_total[1] + class_total[2];
  std::map<std::string, LogOddsModel::Scores> zscores;
  if (total == 0) return LogOddsModel(prior_scale, {});

  const double a0 = prior_scale;
  for (const auto& [noun, y] : counts) {
    const double yw = y[0] + y[1] + y[2];
    const double aw = prior_scale * yw / total;
    LogOddsModel::Scores z{};
    for (int i = 0; i < kNumClasses; ++i) {
      const double in_num = y[i] + aw;
      const double in_den = class_total[i] + a0 - y[i] - aw;
      const double out_num = yw - y[i] + aw;
      const double out_den = total - class_total[i] + a0 - yw + y[i] - aw;
      if (in_den <= 0 || out_den <= 0) continue;
      const double delta = std::log(in_num / in_den) - std::log(out_num / out_den);
      const double var = 1.0 / in_num + 1.0 / out_num;
      z[i] = delta / std::sqrt(var);
    }
    zscores.emplace(noun, z);
  }
  return LogOddsModel(prior_scale, std::move(zscores));
}

}  // namespace hatestack
