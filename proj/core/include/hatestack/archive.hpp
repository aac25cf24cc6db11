#pragma once

#include <filesystem>
#include <string>

#include "hatestack/serialize.hpp"
#include "hatestack/stack.hpp"

namespace hatestack {

inline constexpr int kArchiveFormatVersion = 1;

/// Directory layout of a platform model:
///   manifest.json log_odds.json pls.json standardizer.json
///   clf_not_clean.json clf_hate.json oof.json
/// The directory is written next to its final location and renamed into
/// place, replacing any previous archive.
void save_platform_model(const PlatformModel& model, const std::filesystem::path& dir);
PlatformModel load_platform_model(const std::filesystem::path& dir);

/// Provenance recorded in a superlearner manifest.
struct ArchiveInfo {
  std::string embedding_provider;
  int embedding_dim = 0;
  std::string config_hash;
  Json lexicon_digests = Json::object();
};

/// manifest.json, meta.json and platforms/<tag>/ (one platform archive per
/// base model, in registry order).
void save_superlearner(const SuperLearner& sl, const ArchiveInfo& info, const std::filesystem::path& dir);

struct LoadedSuperLearner {
  SuperLearner model;
  ArchiveInfo info;
};

LoadedSuperLearner load_superlearner(const std::filesystem::path& dir);

Envelope oof_to_envelope(const std::map<std::string, SeverityDistribution>& oof);
std::map<std::string, SeverityDistribution> oof_from_envelope(const Envelope& e);

}  // namespace hatestack
