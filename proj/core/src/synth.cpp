#include "hatestack/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "hatestack/error.hpp"
#include "hatestack/rng.hpp"

namespace hatestack {

namespace {

std::vector<std::string> words(std::initializer_list<const char*> list) { return {list.begin(), list.end()}; }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
  return pool[static_cast<std::size_t>(rng.index(pool.size()))];
}

std::uint64_t tag_salt(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SynthVocabulary SynthVocabulary::standard() {
  SynthVocabulary v;
  v.core = words({"the",     "a",       "and",     "of",      "to",      "in",      "is",      "it",
                  "that",    "for",     "on",      "with",    "this",    "was",     "at",      "from",
                  "just",    "about",   "what",    "some",    "there",   "when",    "been",    "more",
                  "today",   "time",    "day",     "week",    "year",    "post",    "thing",   "things",
                  "people",  "friends", "family",  "home",    "work",    "news",    "story",   "stories",
                  "photos",  "games",   "music",   "movies",  "books",   "food",    "coffee",  "weather",
                  "city",    "town",    "street",  "car",     "cars",    "school",  "kids",    "parents",
                  "team",    "players", "match",   "season",  "price",   "prices",  "money",   "jobs",
                  "market",  "plans",   "ideas",   "question", "answer", "reason",  "really",  "think",
                  "know",    "see",     "said",    "going",   "make",    "made",    "get",     "got",
                  "look",    "read",    "watch",   "need",    "want",    "come",    "took",    "right",
                  "still",   "never",   "always",  "maybe",   "again",   "later",   "early",   "long",
                  "new",     "old",     "big",     "small",   "first",   "last",    "other",   "many",
                  "every",   "around",  "because", "after",   "before",  "while",   "then",    "than",
                  "though",  "yes",     "okay",    "sure",    "well",    "pretty",  "quite",   "almost"});
  v.shared_slurs = words({"grexlins", "vorbaks", "skrells", "mukdars", "zintors", "grexlin", "vorbak"});
  v.swears = words({"blarg", "blarging", "frack", "fracking", "smeg", "smegging", "gorram", "drokk", "frell",
                    "frelling", "shazbot", "skag"});
  v.positive = words({"good", "great", "love", "happy", "nice", "wonderful", "beautiful", "thanks", "fun",
                      "enjoy", "lovely", "glad", "amazing", "friendly", "helpful"});
  v.negative = words({"bad", "hate", "terrible", "awful", "disgusting", "evil", "ugly", "worst", "stupid",
                      "filthy", "vile", "dirty", "horrible", "pathetic", "nasty", "dangerous", "destroy"});
  v.ingroup = words({"we", "us", "our"});
  v.outgroup = words({"they", "them", "their"});
  v.symbols = words({"1488", "(((globalists)))", "rahowa", "14 words"});
  return v;
}

void SynthVocabulary::validate() const {
  const std::pair<const char*, const std::vector<std::string>*> pools[] = {
      {"core", &core},         {"shared_slurs", &shared_slurs}, {"swears", &swears},     {"positive", &positive},
      {"negative", &negative}, {"ingroup", &ingroup},           {"outgroup", &outgroup}, {"symbols", &symbols}};
  for (const auto& [name, pool] : pools) {
    if (pool->empty()) throw DataError(std::string("synthetic vocabulary: empty pool '") + name + "'");
  }
}

void PlatformProfile::validate() const {
  if (platform.empty()) throw DataError("synthetic profile: empty platform name");
  double sum = 0;
  for (double p : class_mix) {
    if (!(p >= 0)) throw DataError("synthetic profile '" + platform + "': negative class share");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("synthetic profile '" + platform + "': class mix must sum to 1");
  if (markers.empty()) throw DataError("synthetic profile '" + platform + "': empty marker vocabulary");
  if (coded_slurs.empty()) throw DataError("synthetic profile '" + platform + "': empty coded-slur vocabulary");
  if (!(mean_length >= 2) || !(sd_length >= 0)) throw DataError("synthetic profile '" + platform + "': bad length");
}

Json PlatformProfile::to_json() const {
  const auto& r = rates;
  return Json{{"platform", platform},
              {"class_mix", class_mix},
              {"markers", markers},
              {"coded_slurs", coded_slurs},
              {"mean_length", mean_length},
              {"sd_length", sd_length},
              {"rates",
               {{"hate_cue_rate", r.hate_cue_rate},
                {"hate_slur_given_cue", r.hate_slur_given_cue},
                {"hate_othering_given_cue", r.hate_othering_given_cue},
                {"hate_swear", r.hate_swear},
                {"hate_negative", r.hate_negative},
                {"hate_symbol", r.hate_symbol},
                {"offensive_swear", r.offensive_swear},
                {"offensive_negative", r.offensive_negative},
                {"offensive_othering", r.offensive_othering},
                {"clean_swear", r.clean_swear},
                {"clean_othering", r.clean_othering},
                {"clean_positive", r.clean_positive},
                {"clean_negative", r.clean_negative},
                {"shared_slur_share", r.shared_slur_share},
                {"url_rate", r.url_rate},
                {"hashtag_rate", r.hashtag_rate}}}};
}

PlatformProfile standard_profile(std::string_view platform) {
  PlatformProfile p;
  p.platform = std::string(platform);
  if (platform == "facebook") {
    p.class_mix = {0.70, 0.12, 0.18};
    p.markers = words({"timeline", "groupchat", "fbpage", "likes", "shares", "memories", "marketplace", "events",
                       "statuses", "reactions", "pokes", "newsfeed"});
    p.coded_slurs = words({"plonkards", "wezzles", "crimbos", "drabbits"});
    p.mean_length = 16;
  } else if (platform == "gab") {
    p.class_mix = {0.71, 0.13, 0.16};
    p.markers = words({"gabbers", "freespeech", "censors", "normies", "redpill", "patriots", "bigtech",
                       "reposts", "chads", "based", "frogs", "gabfam"});
    p.coded_slurs = words({"snorvils", "kweelers", "zobbits", "gripnars"});
    p.mean_length = 14;
  } else if (platform == "twitter") {
    p.class_mix = {0.43, 0.43, 0.14};
    p.markers = words({"retweets", "followers", "trending", "timelines", "mentions", "hashtags", "threads",
                       "ratio", "blocked", "muted", "tweets", "dms"});
    p.coded_slurs = words({"flurbos", "nackles", "trimbles", "voskins"});
    p.mean_length = 11;
    p.sd_length = 3;
    p.rates.hashtag_rate = 0.35;
    // Keyword-sampled: hate leans on coded slurs and swearing.
    p.rates.shared_slur_share = 0.05;
    p.rates.hate_swear = 0.75;
    p.rates.hate_othering_given_cue = 0.35;
  } else if (platform == "stormfront") {
    p.class_mix = {0.87, 0.04, 0.10};
    p.markers = words({"forum", "heritage", "ancestry", "folk", "threadstarter", "moderators", "kinfolk",
                       "homeland", "traditions", "brethren", "subforum", "lineage"});
    p.coded_slurs = words({"murglings", "hobskins", "treklars", "gulvers"});
    p.mean_length = 20;
    p.sd_length = 6;
  } else if (platform == "reddit") {
    p.class_mix = {0.55, 0.20, 0.25};
    p.markers = words({"subreddit", "upvotes", "downvotes", "karma", "redditors", "mods", "crossposts",
                       "flairs", "awards", "subs", "lurkers", "threadz"});
    p.coded_slurs = words({"quobbles", "yarnlings", "pezzards", "clomphs"});
    p.mean_length = 15;
  } else {
    throw UsageError("no built-in synthetic profile named '" + std::string(platform) + "'");
  }
  // Published shares are rounded and need not sum to exactly 1.
  const double total = p.class_mix[0] + p.class_mix[1] + p.class_mix[2];
  for (double& share : p.class_mix) share /= total;
  return p;
}

std::vector<std::string> standard_profile_names() { return {"facebook", "gab", "twitter", "stormfront", "reddit"}; }

std::vector<PlatformProfile> standard_profiles(std::span<const std::string> names) {
  std::vector<PlatformProfile> out;
  for (const auto& n : names) out.push_back(standard_profile(n));
  return out;
}

namespace {

Severity draw_class(Rng& rng, const std::array<double, kNumClasses>& mix) {
  const double u = rng.uniform();
  if (u < mix[0]) return Severity::Clean;
  if (u < mix[0] + mix[1]) return Severity::Offensive;
  return Severity::Hate;
}

void add_othering(Rng& rng, const SynthVocabulary& v, std::vector<std::string>& cues) {
  cues.push_back(pick(rng, v.ingroup));
  cues.push_back(pick(rng, v.outgroup));
}

std::string render(Rng& rng, std::vector<std::string> tokens, const PlatformProfile& p, const SynthVocabulary& v) {
  rng.shuffle(std::span(tokens));
  if (rng.bernoulli(p.rates.hashtag_rate)) tokens.push_back("#" + pick(rng, p.markers));
  if (rng.bernoulli(p.rates.url_rate)) {
    tokens.push_back("https://www." + p.platform + "-links.com/" + pick(rng, v.core) + "-" + pick(rng, p.markers) +
                     "/");
  }
  std::string out;
  int since_break = 0;
  const int sentence_len = 5 + static_cast<int>(rng.index(6));
  bool capitalize = true;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string t = tokens[i];
    if (capitalize && !t.empty() && std::islower(static_cast<unsigned char>(t[0]))) {
      t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    }
    capitalize = false;
    if (!out.empty()) out += ' ';
    out += t;
    if (++since_break >= sentence_len && i + 1 < tokens.size()) {
      out += rng.bernoulli(0.2) ? "!" : ".";
      since_break = 0;
      capitalize = true;
    } else if (i + 1 < tokens.size() && rng.bernoulli(0.05)) {
      out += ',';
    }
  }
  const double u = rng.uniform();
  out += u < 0.7 ? "." : (u < 0.85 ? "!" : "?");
  return out;
}

std::string generate_message(Rng& rng, Severity label, const PlatformProfile& p, const SynthVocabulary& v) {
  const CueRates& r = p.rates;
  std::vector<std::string> cues;
  switch (label) {
    case Severity::Hate: {
      if (rng.bernoulli(r.hate_cue_rate)) {
        bool slur = rng.bernoulli(r.hate_slur_given_cue);
        const bool othering = rng.bernoulli(r.hate_othering_given_cue);
        if (!slur && !othering) slur = true;
        if (slur) {
          const int count = 1 + static_cast<int>(rng.bernoulli(0.3));
          for (int i = 0; i < count; ++i) {
            cues.push_back(rng.bernoulli(r.shared_slur_share) ? pick(rng, v.shared_slurs) : pick(rng, p.coded_slurs));
          }
        }
        if (othering) add_othering(rng, v, cues);
      }
      if (rng.bernoulli(r.hate_swear)) cues.push_back(pick(rng, v.swears));
      if (rng.bernoulli(r.hate_negative)) cues.push_back(pick(rng, v.negative));
      if (rng.bernoulli(r.hate_symbol)) cues.push_back(pick(rng, v.symbols));
      break;
    }
    case Severity::Offensive:
      if (rng.bernoulli(r.offensive_swear)) {
        const int count = 1 + static_cast<int>(rng.bernoulli(0.35));
        for (int i = 0; i < count; ++i) cues.push_back(pick(rng, v.swears));
      }
      if (rng.bernoulli(r.offensive_negative)) cues.push_back(pick(rng, v.negative));
      if (rng.bernoulli(r.offensive_othering)) add_othering(rng, v, cues);
      break;
    case Severity::Clean:
      if (rng.bernoulli(r.clean_swear)) cues.push_back(pick(rng, v.swears));
      if (rng.bernoulli(r.clean_othering)) add_othering(rng, v, cues);
      if (rng.bernoulli(r.clean_positive)) cues.push_back(pick(rng, v.positive));
      if (rng.bernoulli(r.clean_negative)) cues.push_back(pick(rng, v.negative));
      break;
  }
  const int length = std::max(4, static_cast<int>(std::lround(rng.normal(p.mean_length, p.sd_length))));
  std::vector<std::string> tokens = cues;
  const int n_markers = 1 + static_cast<int>(rng.index(2));
  for (int i = 0; i < n_markers; ++i) tokens.push_back(pick(rng, p.markers));
  while (static_cast<int>(tokens.size()) < length) tokens.push_back(pick(rng, v.core));
  return render(rng, std::move(tokens), p, v);
}

}  // namespace

Dataset generate_corpus(std::span<const PlatformProfile> profiles, int n_per_platform, std::uint64_t seed,
                        const SynthVocabulary& vocab) {
  if (n_per_platform < 30) throw UsageError("generate_corpus: n_per_platform must be at least 30");
  if (profiles.empty()) throw UsageError("generate_corpus: no profiles");
  vocab.validate();
  std::set<std::string> names, markers;
  for (const auto& p : profiles) {
    p.validate();
    if (!names.insert(p.platform).second) throw DataError("generate_corpus: duplicate profile '" + p.platform + "'");
    for (const auto& m : p.markers) {
      if (!markers.insert(m).second) throw DataError("generate_corpus: marker '" + m + "' is shared by two profiles");
    }
  }
  std::vector<LabeledMessage> messages;
  messages.reserve(profiles.size() * static_cast<std::size_t>(n_per_platform));
  for (const auto& p : profiles) {
    Rng rng(Rng::derive(seed, tag_salt(p.platform)));
    for (int i = 0; i < n_per_platform; ++i) {
      const Severity label = draw_class(rng, p.class_mix);
      char id[32];
      std::snprintf(id, sizeof id, "-%06d", i + 1);
      messages.push_back({p.platform + id, p.platform, generate_message(rng, label, p, vocab), label});
    }
  }
  return Dataset(std::move(messages));
}

Json synth_manifest(std::span<const PlatformProfile> profiles, int n_per_platform, std::uint64_t seed) {
  Json list = Json::array();
  for (const auto& p : profiles) list.push_back(p.to_json());
  return Json{{"generator", "hatestack-synth"}, {"n_per_platform", n_per_platform}, {"seed", seed}, {"profiles", list}};
}

LatentOrdinalData generate_latent_ordinal(int n, int d, std::uint64_t seed, double label_noise,
                                          double feature_noise) {
  if (n < 3 || d < 1) throw UsageError("generate_latent_ordinal: need n >= 3 and d >= 1");
  Rng rng(seed);
  std::vector<double> loadings(static_cast<std::size_t>(d));
  for (auto& w : loadings) w = rng.uniform(0.5, 1.5) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
  LatentOrdinalData out;
  out.X.resize(n, d);
  out.labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    const double s = z + label_noise * rng.normal();
    out.labels.push_back(s < -0.4 ? Severity::Clean : (s < 0.6 ? Severity::Offensive : Severity::Hate));
    for (int j = 0; j < d; ++j) out.X(i, j) = loadings[static_cast<std::size_t>(j)] * z + feature_noise * rng.normal();
  }
  return out;
}

}  // namespace hatestack
