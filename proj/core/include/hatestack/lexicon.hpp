#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "hatestack/serialize.hpp"

namespace hatestack {

/// How lexicon terms are matched against a message.
///   Token     - one token equals one term
///   Phrase    - greedy longest run of consecutive tokens equal to a
///               (possibly multi-word) term
///   Substring - literal substrings of the raw text; the entry "(((*)))"
///               stands for the triple-parenthesis echo template
enum class MatchMode { Token, Phrase, Substring };

/// Term -> severity in [1, 100]. Unscored lexicons use severity 1.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, MatchMode mode) : name_(std::move(name)), mode_(mode) {}

  /// Lowercases the term; throws DataError on an empty term or a severity
  /// outside [1, 100].
  void add(std::string_view term, double severity = 1.0);

  const std::string& name() const noexcept { return name_; }
  MatchMode mode() const noexcept { return mode_; }
  const std::map<std::string, double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Severity of a term, or 0 when absent.
  double severity(std::string_view term) const;
  bool contains(std::string_view term) const;

  /// Longest entry measured in space-separated words.
  std::size_t max_words() const noexcept { return max_words_; }

  /// TSV: `term<TAB>severity`, '#' starts a comment, severity optional.
  static Lexicon parse_tsv(std::string_view text, std::string name, MatchMode mode);
  static Lexicon load_tsv(const std::filesystem::path& path, MatchMode mode);
  std::string to_tsv() const;

 private:
  std::string name_;
  MatchMode mode_ = MatchMode::Token;
  std::map<std::string, double> entries_;
  std::unordered_map<std::string, double> lookup_;
  std::size_t max_words_ = 0;
};

using WordSet = std::unordered_set<std::string>;

/// One token per line; '#' comments and blank lines ignored; lowercased.
WordSet parse_word_list(std::string_view text);
WordSet load_word_list(const std::filesystem::path& path);

/// Sorted, newline-terminated form of a word set.
std::string to_word_list(const WordSet& words);

struct PronounInventory {
  WordSet ingroup;
  WordSet outgroup;

  static PronounInventory standard();
  /// Throws DataError if the sets overlap.
  void validate() const;
};

/// Everything the dictionary and syntactic features consult.
struct FeatureResources {
  Lexicon hate_terms{"hate_terms", MatchMode::Phrase};
  Lexicon hate_symbols{"hate_symbols", MatchMode::Substring};
  Lexicon swears{"swears", MatchMode::Token};
  std::unordered_map<std::string, int> valence;  // term -> +1 / -1
  WordSet negators;
  WordSet stopwords;
  PronounInventory pronouns;

  /// Small synthetic stand-in lexicons. Real lexicons are user supplied.
  static FeatureResources builtin();

  /// Reads hate_terms.tsv, hate_symbols.tsv, swears.tsv, valence.tsv,
  /// negators.txt, stopwords.txt, pronouns_ingroup.txt, pronouns_outgroup.txt
  /// from `dir`; any missing file keeps the builtin list.
  static FeatureResources load(const std::filesystem::path& dir);

  /// Writes the files read by load().
  void save(const std::filesystem::path& dir) const;

  /// SHA-256 per resource file, keyed by file name.
  Json digests() const;
};

}  // namespace hatestack
