#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hatestack/corpus.hpp"
#include "hatestack/embeddings.hpp"
#include "hatestack/features.hpp"
#include "hatestack/log_odds.hpp"
#include "hatestack/mlp.hpp"
#include "hatestack/ordinal.hpp"
#include "hatestack/pls.hpp"
#include "hatestack/standardizer.hpp"

namespace hatestack {

/// A message after cleaning, with everything that does not depend on a
/// fitted model: dictionary/syntactic features, plural nouns, embedding.
struct PreparedMessage {
  std::string id;
  std::string platform;
  std::optional<Severity> label;
  FeatureRecord base;
  std::vector<std::string> nouns;
  std::vector<double> embedding;
};

/// Throws DataError when the message is not viable.
PreparedMessage prepare_message(const LabeledMessage& msg, const FeatureResources& res,
                                const EmbeddingProvider& embeddings, const PosTagger& tagger,
                                const PreprocessOptions& options = {});

struct PreparedCorpus {
  std::vector<PreparedMessage> messages;
  /// (id, reason) for every rejected message, in input order.
  std::vector<std::pair<std::string, std::string>> skipped;
};

PreparedCorpus prepare_corpus(const Dataset& d, const FeatureResources& res, const EmbeddingProvider& embeddings,
                              const PosTagger& tagger, const PreprocessOptions& options = {}, int workers = 1);

struct PipelineConfig {
  int k_folds = 10;
  double downsample_ratio = 2.0;
  int pls_components = 50;
  double prior_scale = 1.0;
  double abstain_threshold = kDefaultAbstainThreshold;
  LearnerConfig learner;
  NzvOptions nzv;
  std::uint64_t seed = 0;
  /// Thread count for fold fits; not part of the snapshot.
  int workers = 1;

  Json to_json() const;
  static PipelineConfig from_json(const Json& j);
};

/// The fitted transformation chain of one platform:
/// nouns -> log-odds, embedding -> PLS scores, then
/// [features | scores] -> standardizer -> ordinal classifier.
struct PlatformPipeline {
  LogOddsModel log_odds;
  PlsModel pls;
  Standardizer standardizer;
  std::shared_ptr<const OrdinalClassifier> ordinal;

  /// Raw (pre-standardization) feature vector.
  std::vector<double> raw_features(const PreparedMessage& m) const;
  SeverityDistribution predict(const PreparedMessage& m) const;
};

/// Fits the chain on exactly the given rows (which must be labeled).
PlatformPipeline fit_pipeline(std::span<const PreparedMessage* const> rows, const PipelineConfig& config);

struct PlatformModel {
  std::string platform;
  PlatformPipeline pipeline;
  /// Out-of-fold distribution for every training id.
  std::map<std::string, SeverityDistribution> oof;
  Json config_snapshot;
  std::string embedding_descriptor;
  int fold_fits = 0;
  int fold_attempts = 0;

  bool trained_on(const std::string& id) const { return oof.count(id) != 0; }
  SeverityDistribution predict(const PreparedMessage& m) const { return pipeline.predict(m); }
};

/// k-fold out-of-fold predictions (each fold-train downsampled, every
/// component fitted on fold-train only), then the final pipeline on the
/// downsampled full set. A fold draw that leaves a class out of some
/// fold-train is redrawn with a new seed up to 3 times.
PlatformModel train_platform_model(std::span<const PreparedMessage> rows, const std::string& platform,
                                   const PipelineConfig& config, const std::string& embedding_descriptor = "");

enum class MetaMode { Training, Inference };

/// 3 probabilities per contributing model plus the origin platform.
struct MetaFeatures {
  std::vector<SeverityDistribution> triples;
  std::string origin_platform;

  std::size_t logical_size() const noexcept { return 3 * triples.size() + 1; }
};

/// Counts what meta assembly read and computed.
struct MetaAudit {
  std::size_t oof_reads = 0;
  std::size_t full_predictions = 0;
  /// Full-model predictions on a row that model was trained on.
  std::size_t own_row_full_predictions = 0;
};

using PlatformRegistry = std::vector<std::shared_ptr<const PlatformModel>>;

/// Training mode: the origin platform's triple comes from its stored OOF
/// map (DataError if absent); every other triple from the final models.
/// Inference mode: all triples from the final models.
MetaFeatures assemble_meta_features(const PreparedMessage& m, const PlatformRegistry& models, MetaMode mode,
                                    MetaAudit* audit = nullptr);

/// Width 4P: the 3P probabilities then a one-hot origin over the registered
/// platforms (all zeros for an unregistered platform).
std::vector<double> encode_meta(const MetaFeatures& mf, const PlatformRegistry& models);

struct MetaRow {
  MetaFeatures features;
  Severity label = Severity::Clean;
};

/// Training-mode rows for every labeled message, in input order.
std::vector<MetaRow> assemble_meta_rows(std::span<const PreparedMessage> corpus, const PlatformRegistry& models,
                                        MetaAudit* audit = nullptr, int workers = 1);

struct SuperLearner {
  PlatformRegistry base;
  MlpModel meta;
  MlpParams meta_params;
  double abstain_threshold = kDefaultAbstainThreshold;
  int version = 1;

  std::vector<std::string> platforms() const;
  std::size_t meta_input_width() const noexcept { return 4 * base.size(); }
  Prediction predict(const PreparedMessage& m) const;
};

/// Fits the meta MLP; version 1. Throws DataError on empty input or when
/// fewer than two base models are given.
SuperLearner train_superlearner(PlatformRegistry base, std::span<const MetaRow> rows, const MlpParams& params = {},
                                double abstain_threshold = kDefaultAbstainThreshold);

/// Registers `model`, reassembles training-mode meta rows over `corpus` and
/// refits only the meta MLP. The base models are shared, not copied.
/// Throws DataError on a duplicate platform tag.
SuperLearner add_platform_model(const SuperLearner& sl, std::shared_ptr<const PlatformModel> model,
                                std::span<const PreparedMessage> corpus, MetaAudit* audit = nullptr,
                                int workers = 1);

}  // namespace hatestack
