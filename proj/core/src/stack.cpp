#include "hatestack/stack.hpp"

#include <algorithm>
#include <set>

#include "hatestack/error.hpp"
#include "hatestack/parallel.hpp"
#include "hatestack/rng.hpp"

namespace hatestack {

PreparedMessage prepare_message(const LabeledMessage& msg, const FeatureResources& res,
                                const EmbeddingProvider& embeddings, const PosTagger& tagger,
                                const PreprocessOptions& options) {
  if (auto reason = rejection_reason(msg.text, options)) {
    throw DataError("message '" + msg.id + "' skipped: " + *reason);
  }
  const CleanMessage cm = clean_text(msg);
  PreparedMessage out;
  out.id = msg.id;
  out.platform = msg.platform;
  out.label = msg.label;
  out.base = base_features(cm, msg.text, res);
  out.nouns = plural_nouns(cm.tokens, tagger);
  out.embedding = embeddings.embed(msg.id, cm.tokens);
  if (static_cast<int>(out.embedding.size()) != embeddings.dim()) {
    throw DataError("embedding for '" + msg.id + "' has the wrong length");
  }
  return out;
}

PreparedCorpus prepare_corpus(const Dataset& d, const FeatureResources& res, const EmbeddingProvider& embeddings,
                              const PosTagger& tagger, const PreprocessOptions& options, int workers) {
  std::vector<std::optional<PreparedMessage>> slots(d.size());
  std::vector<std::string> reasons(d.size());
  parallel_for(d.size(), workers, [&](std::size_t i) {
    const LabeledMessage& msg = d[i];
    if (auto reason = rejection_reason(msg.text, options)) {
      reasons[i] = *reason;
      return;
    }
    slots[i] = prepare_message(msg, res, embeddings, tagger, options);
  });
  PreparedCorpus out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (slots[i]) {
      out.messages.push_back(std::move(*slots[i]));
    } else {
      out.skipped.emplace_back(d[i].id, reasons[i]);
    }
  }
  return out;
}

Json PipelineConfig::to_json() const {
  return Json{{"k_folds", k_folds},
              {"downsample_ratio", downsample_ratio},
              {"pls_components", pls_components},
              {"prior_scale", prior_scale},
              {"abstain_threshold", abstain_threshold},
              {"seed", seed},
              {"nzv", {{"freq_ratio", nzv.freq_ratio}, {"unique_fraction", nzv.unique_fraction}}},
              {"learner",
               {{"kind", to_string(learner.kind)},
                {"tune", learner.tune},
                {"tune_folds", learner.tune_folds},
                {"seed", learner.seed},
                {"logistic",
                 {{"l2", learner.logistic.l2},
                  {"epochs", learner.logistic.epochs},
                  {"learning_rate", learner.logistic.learning_rate},
                  {"grad_tolerance", learner.logistic.grad_tolerance}}},
                {"gbt",
                 {{"n_trees", learner.gbt.n_trees},
                  {"max_depth", learner.gbt.max_depth},
                  {"learning_rate", learner.gbt.learning_rate},
                  {"min_leaf", learner.gbt.min_leaf},
                  {"leaf_l2", learner.gbt.leaf_l2}}}}}};
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
  try {
    PipelineConfig c;
    c.k_folds = j.at("k_folds").get<int>();
    c.downsample_ratio = j.at("downsample_ratio").get<double>();
    c.pls_components = j.at("pls_components").get<int>();
    c.prior_scale = j.at("prior_scale").get<double>();
    c.abstain_threshold = j.at("abstain_threshold").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.nzv.freq_ratio = j.at("nzv").at("freq_ratio").get<double>();
    c.nzv.unique_fraction = j.at("nzv").at("unique_fraction").get<double>();
    const Json& l = j.at("learner");
    c.learner.kind = parse_learner_kind(l.at("kind").get<std::string>());
    c.learner.tune = l.at("tune").get<bool>();
    c.learner.tune_folds = l.at("tune_folds").get<int>();
    c.learner.seed = l.at("seed").get<std::uint64_t>();
    const Json& lg = l.at("logistic");
    c.learner.logistic.l2 = lg.at("l2").get<double>();
    c.learner.logistic.epochs = lg.at("epochs").get<int>();
    c.learner.logistic.learning_rate = lg.at("learning_rate").get<double>();
    c.learner.logistic.grad_tolerance = lg.at("grad_tolerance").get<double>();
    const Json& g = l.at("gbt");
    c.learner.gbt.n_trees = g.at("n_trees").get<int>();
    c.learner.gbt.max_depth = g.at("max_depth").get<int>();
    c.learner.gbt.learning_rate = g.at("learning_rate").get<double>();
    c.learner.gbt.min_leaf = g.at("min_leaf").get<int>();
    c.learner.gbt.leaf_l2 = g.at("leaf_l2").get<double>();
    return c;
  } catch (const Json::exception& e) {
    throw DataError(std::string("pipeline config: ") + e.what());
  }
}

std::vector<double> PlatformPipeline::raw_features(const PreparedMessage& m) const {
  FeatureRecord r = m.base;
  const auto lo = log_odds.features(m.nouns);
  r.log_odds_clean = lo[0];
  r.log_odds_offensive = lo[1];
  r.log_odds_hate = lo[2];
  const auto base = r.to_array();
  std::vector<double> out(base.begin(), base.end());
  if (pls.n_components() > 0) {
    const Vector scores = pls.transform(m.embedding);
    out.insert(out.end(), scores.begin(), scores.end());
  }
  return out;
}

SeverityDistribution PlatformPipeline::predict(const PreparedMessage& m) const {
  const Vector x = standardizer.transform(raw_features(m));
  return ordinal->predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

PlatformPipeline fit_pipeline(std::span<const PreparedMessage* const> rows, const PipelineConfig& config) {
  if (rows.size() < 2) throw DataError("fit_pipeline: need at least 2 rows");
  std::vector<Severity> labels;
  std::vector<NounDocument> docs;
  labels.reserve(rows.size());
  for (const PreparedMessage* m : rows) {
    if (!m->label) throw DataError("fit_pipeline: message '" + m->id + "' is unlabeled");
    labels.push_back(*m->label);
    docs.push_back({m->nouns, *m->label});
  }
  PlatformPipeline p;
  p.log_odds = fit_weighted_log_odds(docs, config.prior_scale);

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front()->embedding.size());
  const int k = std::min<int>({config.pls_components, static_cast<int>(d), static_cast<int>(n - 1)});
  if (k > 0) {
    Matrix E(n, d), Y = Matrix::Zero(n, kNumClasses);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& e = rows[static_cast<std::size_t>(i)]->embedding;
      if (static_cast<Eigen::Index>(e.size()) != d) throw DataError("fit_pipeline: inconsistent embedding length");
      E.row(i) = as_vector(e).transpose();
      Y(i, code(labels[static_cast<std::size_t>(i)])) = 1.0;
    }
    PlsOptions opts;
    opts.allow_fewer = true;
    p.pls = fit_pls(E, Y, k, opts).model;
  }

  std::vector<std::vector<double>> raw(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) raw[i] = p.raw_features(*rows[i]);
  Matrix X(n, static_cast<Eigen::Index>(raw.front().size()));
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) = as_vector(raw[static_cast<std::size_t>(i)]).transpose();
  p.standardizer = fit_standardizer(X, config.nzv);
  p.ordinal = std::make_shared<OrdinalClassifier>(
      fit_ordinal(p.standardizer.transform(X), labels, config.learner, config.abstain_threshold));
  return p;
}

namespace {

std::uint64_t tag_salt(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool all_classes(std::span<const Severity> labels, std::span<const std::size_t> rows) {
  std::array<bool, kNumClasses> seen{};
  for (std::size_t i : rows) seen[code(labels[i])] = true;
  return seen[0] && seen[1] && seen[2];
}

}  // namespace

PlatformModel train_platform_model(std::span<const PreparedMessage> rows, const std::string& platform,
                                   const PipelineConfig& config, const std::string& embedding_descriptor) {
  if (rows.empty()) throw DataError("train_platform_model: no training rows for '" + platform + "'");
  std::vector<Severity> labels;
  std::set<std::string> ids;
  for (const auto& m : rows) {
    if (m.platform != platform) {
      throw DataError("train_platform_model: message '" + m.id + "' belongs to '" + m.platform + "', not '" +
                      platform + "'");
    }
    if (!m.label) throw DataError("train_platform_model: message '" + m.id + "' is unlabeled");
    if (!ids.insert(m.id).second) throw DataError("train_platform_model: duplicate id '" + m.id + "'");
    labels.push_back(*m.label);
  }
  const std::uint64_t seed = Rng::derive(config.seed, tag_salt(platform));

  std::vector<Fold> folds;
  int attempts = 0;
  constexpr int kMaxRetries = 3;
  for (; attempts <= kMaxRetries; ++attempts) {
    folds = stratified_kfold(labels, config.k_folds, Rng::derive(seed, 10 + static_cast<std::uint64_t>(attempts)));
    if (std::all_of(folds.begin(), folds.end(), [&](const Fold& f) { return all_classes(labels, f.train); })) break;
  }
  if (attempts > kMaxRetries) {
    throw DataError("train_platform_model: every fold draw left a class out of a fold-train set for '" + platform +
                    "'");
  }

  std::vector<std::vector<std::pair<std::size_t, SeverityDistribution>>> fold_preds(folds.size());
  parallel_for(folds.size(), config.workers, [&](std::size_t f) {
    const Fold& fold = folds[f];
    std::vector<Severity> train_labels;
    for (std::size_t i : fold.train) train_labels.push_back(labels[i]);
    const auto keep = downsample_indices(train_labels, config.downsample_ratio, Rng::derive(seed, 1000 + f));
    std::vector<const PreparedMessage*> train_rows;
    for (std::size_t j : keep) train_rows.push_back(&rows[fold.train[j]]);
    const PlatformPipeline fitted = fit_pipeline(train_rows, config);
    for (std::size_t i : fold.validation) fold_preds[f].emplace_back(i, fitted.predict(rows[i]));
  });

  PlatformModel model;
  model.platform = platform;
  model.embedding_descriptor = embedding_descriptor;
  model.config_snapshot = config.to_json();
  model.fold_fits = static_cast<int>(folds.size());
  model.fold_attempts = attempts + 1;
  for (const auto& preds : fold_preds) {
    for (const auto& [i, dist] : preds) model.oof.emplace(rows[i].id, dist);
  }
  if (model.oof.size() != rows.size()) throw DataError("train_platform_model: folds do not cover the training set");

  const auto keep = downsample_indices(labels, config.downsample_ratio, Rng::derive(seed, 1));
  std::vector<const PreparedMessage*> final_rows;
  for (std::size_t i : keep) final_rows.push_back(&rows[i]);
  model.pipeline = fit_pipeline(final_rows, config);
  return model;
}

MetaFeatures assemble_meta_features(const PreparedMessage& m, const PlatformRegistry& models, MetaMode mode,
                                    MetaAudit* audit) {
  MetaFeatures mf;
  mf.origin_platform = m.platform;
  mf.triples.reserve(models.size());
  for (const auto& pm : models) {
    if (mode == MetaMode::Training && pm->platform == m.platform) {
      const auto it = pm->oof.find(m.id);
      if (it == pm->oof.end()) {
        throw DataError("meta assembly: training message '" + m.id + "' has no out-of-fold prediction from '" +
                        pm->platform + "'");
      }
      mf.triples.push_back(it->second);
      if (audit) ++audit->oof_reads;
      continue;
    }
    if (audit) {
      ++audit->full_predictions;
      if (pm->trained_on(m.id)) ++audit->own_row_full_predictions;
    }
    mf.triples.push_back(pm->predict(m));
  }
  return mf;
}

std::vector<double> encode_meta(const MetaFeatures& mf, const PlatformRegistry& models) {
  if (mf.triples.size() != models.size()) throw DataError("encode_meta: triple count does not match the registry");
  std::vector<double> out;
  out.reserve(4 * models.size());
  for (const auto& t : mf.triples) {
    out.push_back(t.p_clean);
    out.push_back(t.p_offensive);
    out.push_back(t.p_hate);
  }
  for (const auto& pm : models) out.push_back(pm->platform == mf.origin_platform ? 1.0 : 0.0);
  return out;
}

std::vector<MetaRow> assemble_meta_rows(std::span<const PreparedMessage> corpus, const PlatformRegistry& models,
                                        MetaAudit* audit, int workers) {
  std::vector<MetaRow> rows(corpus.size());
  std::vector<MetaAudit> audits(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const PreparedMessage& m = corpus[i];
    if (!m.label) throw DataError("meta assembly: message '" + m.id + "' is unlabeled");
    rows[i].features = assemble_meta_features(m, models, MetaMode::Training, &audits[i]);
    rows[i].label = *m.label;
  });
  if (audit) {
    for (const auto& a : audits) {
      audit->oof_reads += a.oof_reads;
      audit->full_predictions += a.full_predictions;
      audit->own_row_full_predictions += a.own_row_full_predictions;
    }
  }
  return rows;
}

std::vector<std::string> SuperLearner::platforms() const {
  std::vector<std::string> out;
  for (const auto& pm : base) out.push_back(pm->platform);
  return out;
}

Prediction SuperLearner::predict(const PreparedMessage& m) const {
  const auto x = encode_meta(assemble_meta_features(m, base, MetaMode::Inference), base);
  const auto p = meta.predict(x);
  const SeverityDistribution d{p[0], p[1], p[2]};
  return {d, decide(d, abstain_threshold)};
}

namespace {

void check_registry(const PlatformRegistry& base) {
  std::set<std::string> tags;
  for (const auto& pm : base) {
    if (!pm) throw DataError("superlearner: null platform model");
    if (!tags.insert(pm->platform).second) throw DataError("superlearner: duplicate platform '" + pm->platform + "'");
  }
}

}  // namespace

SuperLearner train_superlearner(PlatformRegistry base, std::span<const MetaRow> rows, const MlpParams& params,
                                double abstain_threshold) {
  if (base.size() < 2) throw DataError("train_superlearner: stacking needs at least 2 platform models");
  check_registry(base);
  if (rows.empty()) throw DataError("train_superlearner: no meta training rows");
  const auto width = static_cast<Eigen::Index>(4 * base.size());
  Matrix X(static_cast<Eigen::Index>(rows.size()), width);
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto enc = encode_meta(rows[i].features, base);
    X.row(static_cast<Eigen::Index>(i)) = as_vector(enc).transpose();
    y[i] = code(rows[i].label);
  }
  SuperLearner sl;
  sl.base = std::move(base);
  sl.meta = fit_mlp(X, y, params);
  sl.meta_params = params;
  sl.abstain_threshold = abstain_threshold;
  sl.version = 1;
  return sl;
}

SuperLearner add_platform_model(const SuperLearner& sl, std::shared_ptr<const PlatformModel> model,
                                std::span<const PreparedMessage> corpus, MetaAudit* audit, int workers) {
  if (!model) throw DataError("add_platform_model: null platform model");
  for (const auto& pm : sl.base) {
    if (pm->platform == model->platform) {
      throw DataError("add_platform_model: platform '" + model->platform + "' is already registered");
    }
  }
  PlatformRegistry base = sl.base;
  base.push_back(std::move(model));
  const auto rows = assemble_meta_rows(corpus, base, audit, workers);
  SuperLearner out = train_superlearner(std::move(base), rows, sl.meta_params, sl.abstain_threshold);
  out.version = sl.version + 1;
  return out;
}

}  // namespace hatestack
