#include "hatestack/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace hatestack {

const std::array<std::string_view, FeatureRecord::kSize>& FeatureRecord::names() {
  static const std::array<std::string_view, kSize> kNames = {
      "hate_term_count", "hate_severity_sum",   "hate_symbol_count", "obscenity_count",
      "othering_pair_count", "sentiment",       "word_count",        "char_count",
      "sentence_count",  "punct_count",         "pronoun_count",     "negation_count",
      "lexical_density", "flesch_reading_ease", "log_odds_clean",    "log_odds_offensive",
      "log_odds_hate"};
  return kNames;
}

std::array<double, FeatureRecord::kSize> FeatureRecord::to_array() const {
  return {hate_term_count, hate_severity_sum,   hate_symbol_count, obscenity_count,
          othering_pair_count, sentiment,       word_count,        char_count,
          sentence_count,  punct_count,         pronoun_count,     negation_count,
          lexical_density, flesch_reading_ease, log_odds_clean,    log_odds_offensive,
          log_odds_hate};
}

LexiconHits hate_lexicon_features(std::span<const std::string> tokens, const Lexicon& lex) {
  LexiconHits hits;
  if (lex.mode() == MatchMode::Token) {
    for (const auto& t : tokens) {
      if (double s = lex.severity(t); s > 0) {
        ++hits.count;
        hits.severity_sum += s;
      }
    }
    return hits;
  }
  const std::size_t max_words = std::max<std::size_t>(1, lex.max_words());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    double sev = 0;
    std::string phrase;
    for (std::size_t len = 1; len <= max_words && i + len <= tokens.size(); ++len) {
      if (len > 1) phrase.push_back(' ');
      phrase += tokens[i + len - 1];
      if (double s = lex.severity(phrase); s > 0) {
        matched = len;
        sev = s;
      }
    }
    if (matched > 0) {
      ++hits.count;
      hits.severity_sum += sev;
      i += matched;
    } else {
      ++i;
    }
  }
  return hits;
}

namespace {

/// Length of an echo-template match at position i, or 0.
std::size_t echo_match(std::string_view text, std::size_t i) {
  if (text.compare(i, 3, "(((") != 0) return 0;
  std::size_t j = i + 3;
  const std::size_t start = j;
  while (j < text.size() && text[j] != '(' && text[j] != ')' &&
         !std::isspace(static_cast<unsigned char>(text[j]))) {
    ++j;
  }
  if (j == start || text.compare(j, 3, ")))") != 0) return 0;
  return j + 3 - i;
}

}  // namespace

int hate_symbol_count(std::string_view raw_text, const Lexicon& symbols) {
  std::string text(raw_text);
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  int count = 0;
  for (const auto& [pattern, sev] : symbols.entries()) {
    if (pattern == "(((*)))") {
      for (std::size_t i = 0; i < text.size();) {
        if (std::size_t len = echo_match(text, i); len > 0) {
          ++count;
          i += len;
        } else {
          ++i;
        }
      }
      continue;
    }
    for (std::size_t pos = text.find(pattern); pos != std::string::npos;
         pos = text.find(pattern, pos + pattern.size())) {
      ++count;
    }
  }
  return count;
}

int obscenity_count(std::span<const std::string> tokens, const Lexicon& swears) {
  return static_cast<int>(std::count_if(tokens.begin(), tokens.end(),
                                        [&](const std::string& t) { return swears.contains(t); }));
}

Othering othering_score(std::span<const std::string> tokens, const PronounInventory& inv) {
  int in = 0, out = 0;
  for (const auto& t : tokens) {
    if (inv.ingroup.count(t)) ++in;
    if (inv.outgroup.count(t)) ++out;
  }
  return Othering{in > 0 && out > 0, in * out};
}

double sentiment_polarity(std::span<const std::string> tokens,
                          const std::unordered_map<std::string, int>& valence,
                          const WordSet& negators) {
  if (tokens.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = valence.find(tokens[i]);
    if (it == valence.end()) continue;
    bool negated = false;
    for (std::size_t j = (i >= 4 ? i - 4 : 0); j < i; ++j) {
      if (negators.count(tokens[j])) negated = true;
    }
    sum += negated ? -it->second : it->second;
  }
  return std::clamp(sum / std::sqrt(static_cast<double>(tokens.size())), -1.0, 1.0);
}

int syllable_count(std::string_view word) {
  auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool prev = false;
  for (char c : word) {
    const bool v = vowel(c);
    if (v && !prev) ++groups;
    prev = v;
  }
  if (groups > 1 && word.size() >= 2 && word.back() == 'e' && !vowel(word[word.size() - 2])) {
    --groups;
  }
  return std::max(groups, 1);
}

double flesch_reading_ease(double words, double sentences, double syllables) {
  if (words <= 0) return 0.0;
  return 206.835 - 1.015 * (words / std::max(sentences, 1.0)) - 84.6 * (syllables / words);
}

FeatureRecord syntactic_features(const CleanMessage& cm, const WordSet& stopwords,
                                 const PronounInventory& pronouns, const WordSet& negators) {
  FeatureRecord r;
  const auto n = static_cast<double>(cm.tokens.size());
  r.word_count = n;
  r.char_count = cm.char_count_original;
  r.sentence_count = cm.sentence_count;
  r.punct_count = cm.punct_count;
  int content = 0, syllables = 0;
  for (const auto& t : cm.tokens) {
    if (pronouns.ingroup.count(t) || pronouns.outgroup.count(t)) ++r.pronoun_count;
    if (negators.count(t)) ++r.negation_count;
    if (!stopwords.count(t)) ++content;
    syllables += syllable_count(t);
  }
  r.lexical_density = n > 0 ? content / n : 0.0;
  r.flesch_reading_ease = flesch_reading_ease(n, cm.sentence_count, syllables);
  return r;
}

namespace {

const std::unordered_set<std::string_view>& irregular_plurals() {
  static const std::unordered_set<std::string_view> kWords = {
      "men", "women", "children", "people", "mice", "geese", "feet", "teeth",
      "police", "cattle", "oxen", "lice", "data", "criteria", "phenomena", "brethren"};
  return kWords;
}

// Function words and common third-person verbs that end in 's'.
const std::unordered_set<std::string_view>& s_exceptions() {
  static const std::unordered_set<std::string_view> kWords = {
      "is",       "was",     "has",     "does",    "this",     "his",    "its",     "us",
      "yes",      "as",      "thus",    "always",  "perhaps",  "sometimes", "besides", "unless",
      "whereas",  "ours",    "yours",   "theirs",  "hers",     "lets",   "gets",    "says",
      "goes",     "makes",   "takes",   "wants",   "needs",    "seems",  "thinks",  "knows",
      "means",    "comes",   "looks",   "gives",   "keeps",    "tells",  "becomes", "feels",
      "tries",    "uses",    "works",   "calls",   "runs",     "plays",  "moves",   "lives",
      "believes", "happens", "hates",   "loves",   "likes",    "kills",  "various", "famous",
      "serious",  "previous", "obvious", "dangerous", "ridiculous", "nervous", "jealous",
      "bus",      "gas",     "plus",    "bonus",   "virus",    "chaos",  "news",    "whereas",
      "afterwards", "towards", "upwards", "backwards", "nowadays", "otherwise", "yes", "was",
      "does",     "goes",    "seems",   "depends", "ruins",    "steals", "brings",  "sends",
      "wins",     "shows",   "lies",    "cries",   "dies",     "sees",   "agrees",  "spreads"};
  return kWords;
}

}  // namespace

bool HeuristicTagger::is_plural_noun(std::string_view t) {
  if (irregular_plurals().count(t)) return true;
  if (t.size() < 3 || t.back() != 's') return false;
  if (t.find('\'') != std::string_view::npos) return false;
  if (t.ends_with("ss") || t.ends_with("us") || t.ends_with("is")) return false;
  if (std::any_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return false;
  }
  return !s_exceptions().count(t);
}

std::vector<std::string> HeuristicTagger::tag(std::span<const std::string> tokens) const {
  std::vector<std::string> tags;
  tags.reserve(tokens.size());
  for (const auto& t : tokens) tags.emplace_back(is_plural_noun(t) ? "NNS" : "X");
  return tags;
}

std::vector<std::string> plural_nouns(std::span<const std::string> tokens, const PosTagger& tagger) {
  const auto tags = tagger.tag(tokens);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size() && i < tags.size(); ++i) {
    if (tags[i] == "NNS" || tags[i] == "NNPS") out.push_back(tokens[i]);
  }
  return out;
}

FeatureRecord base_features(const CleanMessage& cm, std::string_view raw_text,
                            const FeatureResources& res) {
  FeatureRecord r = syntactic_features(cm, res.stopwords, res.pronouns, res.negators);
  const auto hits = hate_lexicon_features(cm.tokens, res.hate_terms);
  r.hate_term_count = hits.count;
  r.hate_severity_sum = hits.severity_sum;
  r.hate_symbol_count = hate_symbol_count(raw_text, res.hate_symbols);
  r.obscenity_count = obscenity_count(cm.tokens, res.swears);
  r.othering_pair_count = othering_score(cm.tokens, res.pronouns).pair_count;
  r.sentiment = sentiment_polarity(cm.tokens, res.valence, res.negators);
  return r;
}

}  // namespace hatestack
