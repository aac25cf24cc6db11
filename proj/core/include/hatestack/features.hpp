#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hatestack/lexicon.hpp"
#include "hatestack/preprocess.hpp"

namespace hatestack {

/// Every non-embedding feature of one message.
struct FeatureRecord {
  double hate_term_count = 0;
  double hate_severity_sum = 0;
  double hate_symbol_count = 0;
  double obscenity_count = 0;
  double othering_pair_count = 0;
  double sentiment = 0;
  double word_count = 0;
  double char_count = 0;
  double sentence_count = 0;
  double punct_count = 0;
  double pronoun_count = 0;
  double negation_count = 0;
  double lexical_density = 0;
  double flesch_reading_ease = 0;
  double log_odds_clean = 0;
  double log_odds_offensive = 0;
  double log_odds_hate = 0;

  static constexpr std::size_t kSize = 17;
  static const std::array<std::string_view, kSize>& names();
  std::array<double, kSize> to_array() const;
};

struct LexiconHits {
  int count = 0;
  double severity_sum = 0;
};

/// Token or phrase matches (greedy, longest first, non-overlapping),
/// counted with multiplicity.
LexiconHits hate_lexicon_features(std::span<const std::string> tokens, const Lexicon& lex);

/// Non-overlapping occurrences of every symbol pattern in the lowercased raw
/// text. "(((*)))" matches "(((" + one or more characters other than
/// parentheses and whitespace + ")))".
int hate_symbol_count(std::string_view raw_text, const Lexicon& symbols);

int obscenity_count(std::span<const std::string> tokens, const Lexicon& swears);

struct Othering {
  bool present = false;
  int pair_count = 0;
};

/// pair_count = in-group hits x out-group hits.
Othering othering_score(std::span<const std::string> tokens, const PronounInventory& inv);

/// Signed valence hits (flipped when a negator occurs in the preceding four
/// tokens), divided by sqrt(token count), clamped to [-1, 1].
double sentiment_polarity(std::span<const std::string> tokens,
                          const std::unordered_map<std::string, int>& valence,
                          const WordSet& negators);

/// Maximal [aeiouy] groups, minus one for a terminal silent 'e' when more
/// than one group exists; at least 1.
int syllable_count(std::string_view word);

double flesch_reading_ease(double words, double sentences, double syllables);

/// Fills the count, negation, pronoun, lexical density and Flesch fields.
FeatureRecord syntactic_features(const CleanMessage& cm, const WordSet& stopwords,
                                 const PronounInventory& pronouns, const WordSet& negators);

/// Part-of-speech provider. Returns one tag per token; plural nouns are
/// tagged "NNS" or "NNPS" (Penn Treebank).
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<std::string> tag(std::span<const std::string> tokens) const = 0;
};

/// Suffix rule plus an irregular-plural dictionary; tags everything else
/// "X".
class HeuristicTagger final : public PosTagger {
 public:
  std::vector<std::string> tag(std::span<const std::string> tokens) const override;
  static bool is_plural_noun(std::string_view token);
};

std::vector<std::string> plural_nouns(std::span<const std::string> tokens, const PosTagger& tagger);

/// Dictionary + syntactic features of a cleaned message (log-odds fields
/// left at zero; they need a fitted model).
FeatureRecord base_features(const CleanMessage& cm, std::string_view raw_text,
                            const FeatureResources& res);

}  // namespace hatestack
