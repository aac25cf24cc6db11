#include "hatestack/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hatestack/digest.hpp"
#include "hatestack/error.hpp"

namespace hatestack {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename F>
void for_each_line(std::string_view text, F f) {
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      // '#' at column 0 or after whitespace starts a comment
      if (hash == 0 || std::isspace(static_cast<unsigned char>(line[hash - 1]))) {
        line = line.substr(0, hash);
      }
    }
    line = trim(line);
    if (!line.empty()) f(line, line_no);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace

void Lexicon::add(std::string_view term, double severity) {
  std::string t = lower(trim(term));
  if (t.empty()) throw DataError("lexicon '" + name_ + "': empty term");
  if (!(severity >= 1.0 && severity <= 100.0)) {
    throw DataError("lexicon '" + name_ + "': severity of '" + t + "' outside [1,100]");
  }
  std::size_t words = 1 + static_cast<std::size_t>(std::count(t.begin(), t.end(), ' '));
  max_words_ = std::max(max_words_, words);
  lookup_[t] = severity;
  entries_[std::move(t)] = severity;
}

double Lexicon::severity(std::string_view term) const {
  auto it = lookup_.find(std::string(term));
  return it == lookup_.end() ? 0.0 : it->second;
}

bool Lexicon::contains(std::string_view term) const {
  return lookup_.find(std::string(term)) != lookup_.end();
}

Lexicon Lexicon::parse_tsv(std::string_view text, std::string name, MatchMode mode) {
  Lexicon lex(std::move(name), mode);
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      lex.add(line, 1.0);
      return;
    }
    const std::string sev(trim(line.substr(tab + 1)));
    double value = 1.0;
    try {
      std::size_t used = 0;
      value = std::stod(sev, &used);
      if (used != sev.size()) throw std::invalid_argument(sev);
    } catch (const std::exception&) {
      throw DataError("lexicon '" + lex.name_ + "' line " + std::to_string(line_no) +
                      ": bad severity '" + sev + "'");
    }
    lex.add(line.substr(0, tab), value);
  });
  return lex;
}

Lexicon Lexicon::load_tsv(const std::filesystem::path& path, MatchMode mode) {
  return parse_tsv(read_file(path), path.stem().string(), mode);
}

std::string Lexicon::to_tsv() const {
  std::string out;
  for (const auto& [term, sev] : entries_) {
    Json num = sev;
    out += term + "\t" + num.dump() + "\n";
  }
  return out;
}

WordSet parse_word_list(std::string_view text) {
  WordSet out;
  for_each_line(text, [&](std::string_view line, std::size_t) { out.insert(lower(line)); });
  return out;
}

WordSet load_word_list(const std::filesystem::path& path) {
  return parse_word_list(read_file(path));
}

std::string to_word_list(const WordSet& words) {
  std::vector<std::string> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& w : sorted) out += w + "\n";
  return out;
}

PronounInventory PronounInventory::standard() {
  return PronounInventory{
      {"we", "us", "our", "ours", "ourselves", "i", "me", "my", "mine"},
      {"they", "them", "their", "theirs", "themselves", "you", "your", "yours"}};
}

void PronounInventory::validate() const {
  for (const auto& w : ingroup) {
    if (outgroup.count(w)) throw DataError("pronoun '" + w + "' is both in-group and out-group");
  }
}

FeatureResources FeatureResources::builtin() {
  FeatureResources r;
  // Placeholder slur surrogates shared by every platform.
  for (auto [term, sev] : std::initializer_list<std::pair<const char*, double>>{
           {"grexlin", 75}, {"grexlins", 75}, {"vorbak", 60}, {"vorbaks", 60},
           {"skrell", 85}, {"skrells", 85}, {"mukdar", 50}, {"mukdars", 50},
           {"zintor", 40}, {"zintors", 40}, {"grexlin scum", 95}, {"vorbak filth", 90}}) {
    r.hate_terms.add(term, sev);
  }
  for (const char* sym : {"(((*)))", "1488", "14 words", "rahowa"}) r.hate_symbols.add(sym);
  for (const char* w : {"blarg", "blarging", "frack", "fracking", "smeg", "smegging", "gorram",
                        "drokk", "frell", "frelling", "shazbot", "skag"}) {
    r.swears.add(w);
  }
  for (const char* w : {"good", "great", "love", "happy", "nice", "wonderful", "beautiful",
                        "thanks", "best", "fun", "enjoy", "kind", "lovely", "glad", "welcome",
                        "proud", "amazing", "peace", "friendly", "helpful"}) {
    r.valence[w] = 1;
  }
  for (const char* w : {"bad", "hate", "terrible", "awful", "disgusting", "evil", "ugly",
                        "worst", "stupid", "angry", "filthy", "vile", "sick", "dirty",
                        "horrible", "pathetic", "useless", "nasty", "dangerous", "destroy"}) {
    r.valence[w] = -1;
  }
  r.negators = {"not",    "no",     "never",    "don't",    "doesn't", "didn't",  "isn't",
                "wasn't", "aren't", "can't",    "won't",    "nobody",  "nothing", "neither",
                "nor",    "cannot", "shouldn't", "wouldn't", "couldn't", "ain't", "none"};
  r.stopwords = {"a",     "an",    "the",   "and",   "or",    "but",   "if",    "then",  "so",
                 "of",    "at",    "by",    "for",   "with",  "about", "to",    "from",  "in",
                 "on",    "up",    "out",   "over",  "under", "again", "is",    "are",   "was",
                 "were",  "be",    "been",  "being", "have",  "has",   "had",   "do",    "does",
                 "did",   "will",  "would", "should", "can",  "could", "may",   "might", "must",
                 "i",     "me",    "my",    "we",    "us",    "our",   "you",   "your",  "he",
                 "him",   "his",   "she",   "her",   "it",    "its",   "they",  "them",  "their",
                 "this",  "that",  "these", "those", "what",  "which", "who",   "whom",  "there",
                 "here",  "when",  "where", "why",   "how",   "all",   "any",   "both",  "each",
                 "more",  "most",  "some",  "such",  "no",    "not",   "only",  "own",   "same",
                 "than",  "too",   "very",  "just",  "as",    "until", "while", "into",  "through",
                 "also",  "am",    "im",    "it's",  "i'm",   "don't", "yours", "ours",  "theirs"};
  r.pronouns = PronounInventory::standard();
  return r;
}

namespace {

constexpr const char* kHateTerms = "hate_terms.tsv";
constexpr const char* kHateSymbols = "hate_symbols.tsv";
constexpr const char* kSwears = "swears.tsv";
constexpr const char* kValence = "valence.tsv";
constexpr const char* kNegators = "negators.txt";
constexpr const char* kStopwords = "stopwords.txt";
constexpr const char* kIngroup = "pronouns_ingroup.txt";
constexpr const char* kOutgroup = "pronouns_outgroup.txt";

std::string valence_tsv(const std::unordered_map<std::string, int>& valence) {
  std::map<std::string, int> sorted(valence.begin(), valence.end());
  std::string out;
  for (const auto& [term, sign] : sorted) out += term + "\t" + (sign > 0 ? "1" : "-1") + "\n";
  return out;
}

}  // namespace

FeatureResources FeatureResources::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("lexicon directory not found: " + dir.string());
  FeatureResources r = builtin();
  auto has = [&](const char* f) { return std::filesystem::exists(dir / f); };
  if (has(kHateTerms)) r.hate_terms = Lexicon::parse_tsv(read_file(dir / kHateTerms), "hate_terms", MatchMode::Phrase);
  if (has(kHateSymbols)) r.hate_symbols = Lexicon::parse_tsv(read_file(dir / kHateSymbols), "hate_symbols", MatchMode::Substring);
  if (has(kSwears)) r.swears = Lexicon::parse_tsv(read_file(dir / kSwears), "swears", MatchMode::Token);
  if (has(kValence)) {
    r.valence.clear();
    for_each_line(read_file(dir / kValence), [&](std::string_view line, std::size_t line_no) {
      const auto tab = line.find('\t');
      const std::string_view sign = tab == std::string_view::npos ? "" : trim(line.substr(tab + 1));
      if (sign != "1" && sign != "+1" && sign != "-1") {
        throw DataError(std::string(kValence) + " line " + std::to_string(line_no) + ": sign must be 1 or -1");
      }
      r.valence[lower(trim(line.substr(0, tab)))] = sign == "-1" ? -1 : 1;
    });
  }
  if (has(kNegators)) r.negators = load_word_list(dir / kNegators);
  if (has(kStopwords)) r.stopwords = load_word_list(dir / kStopwords);
  if (has(kIngroup)) r.pronouns.ingroup = load_word_list(dir / kIngroup);
  if (has(kOutgroup)) r.pronouns.outgroup = load_word_list(dir / kOutgroup);
  r.pronouns.validate();
  return r;
}

void FeatureResources::save(const std::filesystem::path& dir) const {
  write_file_atomic(dir / kHateTerms, hate_terms.to_tsv());
  write_file_atomic(dir / kHateSymbols, hate_symbols.to_tsv());
  write_file_atomic(dir / kSwears, swears.to_tsv());
  write_file_atomic(dir / kValence, valence_tsv(valence));
  write_file_atomic(dir / kNegators, to_word_list(negators));
  write_file_atomic(dir / kStopwords, to_word_list(stopwords));
  write_file_atomic(dir / kIngroup, to_word_list(pronouns.ingroup));
  write_file_atomic(dir / kOutgroup, to_word_list(pronouns.outgroup));
}

Json FeatureResources::digests() const {
  return Json{{kHateTerms, sha256_hex(hate_terms.to_tsv())},
              {kHateSymbols, sha256_hex(hate_symbols.to_tsv())},
              {kSwears, sha256_hex(swears.to_tsv())},
              {kValence, sha256_hex(valence_tsv(valence))},
              {kNegators, sha256_hex(to_word_list(negators))},
              {kStopwords, sha256_hex(to_word_list(stopwords))},
              {kIngroup, sha256_hex(to_word_list(pronouns.ingroup))},
              {kOutgroup, sha256_hex(to_word_list(pronouns.outgroup))}};
}

}  // namespace hatestack
