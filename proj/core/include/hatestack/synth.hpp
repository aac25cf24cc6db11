#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hatestack/corpus.hpp"
#include "hatestack/linalg.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack {

/// Token pools shared by every platform.
struct SynthVocabulary {
  std::vector<std::string> core;          // neutral filler
  std::vector<std::string> shared_slurs;  // slur surrogates known to the builtin lexicon
  std::vector<std::string> swears;
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  std::vector<std::string> ingroup;
  std::vector<std::string> outgroup;
  std::vector<std::string> symbols;

  static SynthVocabulary standard();
  /// Throws DataError naming the first empty pool.
  void validate() const;
};

/// Per-class emission rates. A hate message carries a cue (slur and/or
/// othering pattern) with probability hate_cue_rate.
struct CueRates {
  double hate_cue_rate = 0.95;
  double hate_slur_given_cue = 0.8;
  double hate_othering_given_cue = 0.55;
  double hate_swear = 0.3;
  double hate_negative = 0.55;
  double hate_symbol = 0.06;
  double offensive_swear = 0.85;
  double offensive_negative = 0.45;
  double offensive_othering = 0.12;
  double clean_swear = 0.03;
  double clean_othering = 0.02;
  double clean_positive = 0.45;
  double clean_negative = 0.03;
  /// Share of hate slurs drawn from the shared pool (rest: platform pool).
  double shared_slur_share = 0.2;
  double url_rate = 0.08;
  double hashtag_rate = 0.1;
};

struct PlatformProfile {
  std::string platform;
  std::array<double, kNumClasses> class_mix{};
  /// Platform vocabulary; disjoint across profiles.
  std::vector<std::string> markers;
  /// Platform-coded slur surrogates (plural nouns absent from the lexicon).
  std::vector<std::string> coded_slurs;
  double mean_length = 14;
  double sd_length = 4;
  CueRates rates;

  /// Throws DataError for a non-simplex mix or an empty vocabulary.
  void validate() const;
  Json to_json() const;
};

/// Built-in profiles: facebook, gab, twitter, stormfront (class mixes of the
/// four training corpora) and reddit (a held-out platform).
PlatformProfile standard_profile(std::string_view platform);
std::vector<std::string> standard_profile_names();
std::vector<PlatformProfile> standard_profiles(std::span<const std::string> names);

/// n_per_platform labeled messages per profile, ids "<platform>-<n>".
/// Deterministic given seed; each profile draws from its own derived
/// stream. Throws UsageError when n_per_platform < 30 and DataError for a
/// degenerate profile or vocabulary.
Dataset generate_corpus(std::span<const PlatformProfile> profiles, int n_per_platform, std::uint64_t seed,
                        const SynthVocabulary& vocab = SynthVocabulary::standard());

/// Ground-truth manifest written next to a synthetic corpus.
Json synth_manifest(std::span<const PlatformProfile> profiles, int n_per_platform, std::uint64_t seed);

/// Feature-space data for ordinal checks: a latent severity z ~ N(0,1),
/// labels by thresholding z + noise at two cut points, and d features that
/// are noisy linear functions of z.
struct LatentOrdinalData {
  Matrix X;
  std::vector<Severity> labels;
};

LatentOrdinalData generate_latent_ordinal(int n, int d, std::uint64_t seed, double label_noise = 0.35,
                                          double feature_noise = 1.0);

}  // namespace hatestack
