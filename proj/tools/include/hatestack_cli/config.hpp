#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "hatestack/embeddings.hpp"
#include "hatestack/eval.hpp"
#include "hatestack/lexicon.hpp"
#include "hatestack/mlp.hpp"
#include "hatestack/stack.hpp"

namespace hatestack::cli {

/// Every knob of a run. Loaded from a flat `key = value` file, then
/// overridden by HATESTACK_<KEY> environment variables, then by flags.
struct RunConfig {
  PipelineConfig pipeline;
  MlpParams meta;
  double train_frac = 0.8;
  std::string embedding_provider = "hashed:128";
  std::filesystem::path embeddings_path;
  std::filesystem::path lexicon_dir;
  AbstainMode abstain_mode = AbstainMode::AsError;
  int workers = 1;

  /// Sets one key; throws UsageError for an unknown key or a value out of
  /// range.
  void set(const std::string& key, const std::string& value);

  /// Effective values as sorted key -> text pairs (paths and workers
  /// excluded).
  std::map<std::string, std::string> canonical() const;

  /// SHA-256 over the canonical `key=value` lines.
  std::string hash() const;

  void validate() const;
};

inline constexpr const char* kEnvPrefix = "HATESTACK_";

/// Parses `key = value` lines ('#' comments, blank lines ignored).
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");

/// Defaults, then the file (if given), then the environment.
RunConfig load_config(const std::optional<std::filesystem::path>& path);

/// Documented keys with their defaults, one per line.
std::string describe_keys();

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const RunConfig& cfg);
FeatureResources load_resources(const RunConfig& cfg);

}  // namespace hatestack::cli
