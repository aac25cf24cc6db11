#include "hatestack/ordinal.hpp"

#include <algorithm>

#include "hatestack/error.hpp"

namespace hatestack {

SeverityDistribution combine_probs(double p_not_clean, double p_hate) {
  p_not_clean = std::clamp(p_not_clean, 0.0, 1.0);
  p_hate = std::clamp(p_hate, 0.0, 1.0);
  SeverityDistribution d{1.0 - p_not_clean, p_not_clean - p_hate, p_hate};
  if (d.p_offensive < 0) {
    d.p_offensive = 0;
    const double total = d.p_clean + d.p_hate;
    d.p_clean /= total;
    d.p_hate /= total;
  }
  return d;
}

Decision decide(const SeverityDistribution& dist, double abstain_threshold) {
  const auto p = dist.as_array();
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return {severity_from_code(best), p[best] < abstain_threshold};
}

std::string to_string(LearnerKind kind) { return kind == LearnerKind::Logistic ? "logistic" : "gbt"; }

LearnerKind parse_learner_kind(std::string_view name) {
  if (name == "logistic") return LearnerKind::Logistic;
  if (name == "gbt") return LearnerKind::Gbt;
  throw UsageError("unknown learner '" + std::string(name) + "' (expected logistic or gbt)");
}

std::shared_ptr<const BinaryModel> fit_binary(const Matrix& X, std::span<const int> y, const LearnerConfig& config) {
  if (config.kind == LearnerKind::Logistic) return std::make_shared<LogisticModel>(fit_logistic(X, y, config.logistic));
  return std::make_shared<GbtModel>(fit_gbt(X, y, config.gbt));
}

std::shared_ptr<const BinaryModel> binary_model_from_envelope(const Envelope& e) {
  if (e.kind == "logistic") return std::make_shared<LogisticModel>(LogisticModel::from_envelope(e));
  if (e.kind == "gbt") return std::make_shared<GbtModel>(GbtModel::from_envelope(e));
  throw DataError("unknown binary model kind '" + e.kind + "'");
}

OrdinalClassifier::OrdinalClassifier(std::shared_ptr<const BinaryModel> not_clean,
                                     std::shared_ptr<const BinaryModel> hate, double abstain_threshold)
    : not_clean_(std::move(not_clean)), hate_(std::move(hate)), threshold_(abstain_threshold) {
  if (!not_clean_ || !hate_) throw DataError("ordinal classifier needs two binary models");
  if (not_clean_->input_dim() != hate_->input_dim()) {
    throw DataError("ordinal classifier: binary models disagree on input dimension");
  }
}

SeverityDistribution OrdinalClassifier::predict(std::span<const double> x) const {
  return combine_probs(not_clean_->predict_prob(x), hate_->predict_prob(x));
}

std::array<int, 2> ordinal_targets(Severity s) noexcept {
  return {s >= Severity::Offensive ? 1 : 0, s == Severity::Hate ? 1 : 0};
}

namespace {

void require_all_classes(std::span<const Severity> labels) {
  std::array<int, kNumClasses> seen{};
  for (Severity s : labels) ++seen[code(s)];
  for (Severity s : kAllSeverities) {
    if (seen[code(s)] == 0) {
      throw DataError("fit_ordinal: no training rows labeled " + std::string(to_string(s)));
    }
  }
}

}  // namespace

OrdinalClassifier fit_ordinal(const Matrix& X, std::span<const Severity> labels, const LearnerConfig& config,
                              double abstain_threshold) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) throw DataError("fit_ordinal: label count mismatch");
  require_all_classes(labels);
  std::vector<int> y_not_clean(labels.size()), y_hate(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto t = ordinal_targets(labels[i]);
    y_not_clean[i] = t[0];
    y_hate[i] = t[1];
  }
  LearnerConfig effective = config;
  if (config.kind == LearnerKind::Gbt && config.tune) {
    effective.gbt = tune_gbt(X, labels, config.gbt, config.tune_folds, config.seed).best;
  }
  return OrdinalClassifier(fit_binary(X, y_not_clean, effective), fit_binary(X, y_hate, effective),
                           abstain_threshold);
}

Prediction predict_ordinal(const OrdinalClassifier& oc, std::span<const double> x) {
  const SeverityDistribution d = oc.predict(x);
  return {d, decide(d, oc.abstain_threshold())};
}

namespace {

Matrix select_rows(const Matrix& X, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

GbtGridResult tune_gbt(const Matrix& X, std::span<const Severity> labels, const GbtParams& base, int folds,
                       std::uint64_t seed) {
  const auto splits = stratified_kfold(labels, folds, seed);
  GbtGridResult result;
  for (int depth : {2, 3, 4}) {
    for (int trees : {50, 100, 200}) {
      for (double lr : {0.05, 0.1, 0.3}) {
        LearnerConfig cfg;
        cfg.kind = LearnerKind::Gbt;
        cfg.gbt = base;
        cfg.gbt.max_depth = depth;
        cfg.gbt.n_trees = trees;
        cfg.gbt.learning_rate = lr;
        double f1_sum = 0;
        for (const Fold& f : splits) {
          std::vector<Severity> train_labels;
          for (std::size_t i : f.train) train_labels.push_back(labels[i]);
          const auto oc = fit_ordinal(select_rows(X, f.train), train_labels, cfg);
          int tp = 0, fp = 0, fn = 0;
          for (std::size_t i : f.validation) {
            const bool pred = decide(oc.predict(row_span(X, static_cast<Eigen::Index>(i)))).label == Severity::Hate;
            const bool truth = labels[i] == Severity::Hate;
            tp += pred && truth;
            fp += pred && !truth;
            fn += !pred && truth;
          }
          f1_sum += tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
        }
        const double f1 = f1_sum / static_cast<double>(splits.size());
        if (f1 > result.best_f1) {
          result.best_f1 = f1;
          result.best = cfg.gbt;
        }
      }
    }
  }
  return result;
}

}  // namespace hatestack
