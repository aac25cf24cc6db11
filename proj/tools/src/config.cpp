#include "hatestack_cli/config.hpp"

#include <charconv>
#include <cstdlib>

#include "hatestack/digest.hpp"
#include "hatestack/error.hpp"
#include "hatestack/serialize.hpp"

namespace hatestack::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError("config " + key + ": '" + v + "' is not a number");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw UsageError("config " + key + ": '" + v + "' is not an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("config " + key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config " + key + ": '" + v + "' is not a boolean");
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  auto& p = pipeline;
  auto& g = p.learner.gbt;
  if (key == "k_folds") p.k_folds = static_cast<int>(to_int(key, value));
  else if (key == "train_frac") train_frac = to_double(key, value);
  else if (key == "downsample_ratio") p.downsample_ratio = to_double(key, value);
  else if (key == "pls_components") p.pls_components = static_cast<int>(to_int(key, value));
  else if (key == "prior_scale") p.prior_scale = to_double(key, value);
  else if (key == "abstain_threshold") p.abstain_threshold = to_double(key, value);
  else if (key == "seed") {
    p.seed = to_u64(key, value);
    p.learner.seed = p.seed;
    meta.seed = p.seed;
  }
  else if (key == "learner") p.learner.kind = parse_learner_kind(value);
  else if (key == "tune") p.learner.tune = to_bool(key, value);
  else if (key == "tune_folds") p.learner.tune_folds = static_cast<int>(to_int(key, value));
  else if (key == "gbt_n_trees") g.n_trees = static_cast<int>(to_int(key, value));
  else if (key == "gbt_max_depth") g.max_depth = static_cast<int>(to_int(key, value));
  else if (key == "gbt_learning_rate") g.learning_rate = to_double(key, value);
  else if (key == "gbt_min_leaf") g.min_leaf = static_cast<int>(to_int(key, value));
  else if (key == "gbt_leaf_l2") g.leaf_l2 = to_double(key, value);
  else if (key == "logistic_l2") p.learner.logistic.l2 = to_double(key, value);
  else if (key == "logistic_epochs") p.learner.logistic.epochs = static_cast<int>(to_int(key, value));
  else if (key == "meta_hidden") meta.hidden = static_cast<int>(to_int(key, value));
  else if (key == "meta_epochs") meta.epochs = static_cast<int>(to_int(key, value));
  else if (key == "meta_learning_rate") meta.learning_rate = to_double(key, value);
  else if (key == "meta_l2") meta.l2 = to_double(key, value);
  else if (key == "meta_batch_size") meta.batch_size = static_cast<int>(to_int(key, value));
  else if (key == "meta_activation") {
    if (value != "tanh" && value != "relu") throw UsageError("config meta_activation: expected tanh or relu");
    meta.activation = value == "tanh" ? Activation::Tanh : Activation::Relu;
  }
  else if (key == "embedding_provider") embedding_provider = value;
  else if (key == "embeddings_path") embeddings_path = value;
  else if (key == "lexicon_dir") lexicon_dir = value;
  else if (key == "abstain_mode") abstain_mode = parse_abstain_mode(value);
  else if (key == "workers") workers = static_cast<int>(to_int(key, value));
  else throw UsageError("unknown config key '" + key + "'");
  pipeline.workers = workers;
}

std::map<std::string, std::string> RunConfig::canonical() const {
  const auto& p = pipeline;
  const auto& g = p.learner.gbt;
  return {{"k_folds", std::to_string(p.k_folds)},
          {"train_frac", fmt(train_frac)},
          {"downsample_ratio", fmt(p.downsample_ratio)},
          {"pls_components", std::to_string(p.pls_components)},
          {"prior_scale", fmt(p.prior_scale)},
          {"abstain_threshold", fmt(p.abstain_threshold)},
          {"seed", std::to_string(p.seed)},
          {"learner", to_string(p.learner.kind)},
          {"tune", p.learner.tune ? "true" : "false"},
          {"tune_folds", std::to_string(p.learner.tune_folds)},
          {"gbt_n_trees", std::to_string(g.n_trees)},
          {"gbt_max_depth", std::to_string(g.max_depth)},
          {"gbt_learning_rate", fmt(g.learning_rate)},
          {"gbt_min_leaf", std::to_string(g.min_leaf)},
          {"gbt_leaf_l2", fmt(g.leaf_l2)},
          {"logistic_l2", fmt(p.learner.logistic.l2)},
          {"logistic_epochs", std::to_string(p.learner.logistic.epochs)},
          {"meta_hidden", std::to_string(meta.hidden)},
          {"meta_epochs", std::to_string(meta.epochs)},
          {"meta_learning_rate", fmt(meta.learning_rate)},
          {"meta_l2", fmt(meta.l2)},
          {"meta_batch_size", std::to_string(meta.batch_size)},
          {"meta_activation", meta.activation == Activation::Tanh ? "tanh" : "relu"},
          {"embedding_provider", embedding_provider},
          {"abstain_mode", std::string(to_string(abstain_mode))}};
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : canonical()) text += k + "=" + v + "\n";
  return sha256_hex(text);
}

void RunConfig::validate() const {
  const auto& p = pipeline;
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw UsageError("config: " + what);
  };
  require(p.k_folds >= 2, "k_folds must be at least 2");
  require(train_frac > 0 && train_frac <= 1, "train_frac must lie in (0, 1]");
  require(p.downsample_ratio >= 1, "downsample_ratio must be at least 1");
  require(p.pls_components >= 0, "pls_components must be non-negative");
  require(p.prior_scale > 0, "prior_scale must be positive");
  require(p.abstain_threshold >= 0 && p.abstain_threshold <= 1, "abstain_threshold must lie in [0, 1]");
  require(p.learner.tune_folds >= 2, "tune_folds must be at least 2");
  require(p.learner.gbt.n_trees >= 0, "gbt_n_trees must be non-negative");
  require(p.learner.gbt.max_depth >= 1, "gbt_max_depth must be at least 1");
  require(p.learner.gbt.learning_rate > 0, "gbt_learning_rate must be positive");
  require(p.learner.gbt.min_leaf >= 1, "gbt_min_leaf must be at least 1");
  require(p.learner.gbt.leaf_l2 >= 0, "gbt_leaf_l2 must be non-negative");
  require(p.learner.logistic.l2 >= 0, "logistic_l2 must be non-negative");
  require(p.learner.logistic.epochs >= 1, "logistic_epochs must be at least 1");
  require(meta.hidden >= 1, "meta_hidden must be at least 1");
  require(meta.epochs >= 1, "meta_epochs must be at least 1");
  require(meta.learning_rate > 0, "meta_learning_rate must be positive");
  require(meta.l2 >= 0, "meta_l2 must be non-negative");
  require(meta.batch_size >= 1, "meta_batch_size must be at least 1");
  require(workers >= 1, "workers must be at least 1");
  if (embedding_provider.rfind("hashed:", 0) == 0) {
    const auto dim = to_int("embedding_provider", embedding_provider.substr(7));
    require(dim >= 8, "hashed embedding dimension must be at least 8");
  } else {
    require(embedding_provider == "external", "embedding_provider must be 'external' or 'hashed:<dim>'");
    require(!embeddings_path.empty(), "embedding_provider=external needs embeddings_path");
  }
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path) {
  RunConfig cfg;
  if (path) {
    if (!std::filesystem::exists(*path)) throw DataError("config file not found: " + path->string());
    cfg = parse_config(read_file(*path), path->string());
  }
  std::vector<std::string> keys;
  for (const auto& [k, v] : cfg.canonical()) keys.push_back(k);
  for (const char* k : {"embeddings_path", "lexicon_dir", "workers"}) keys.emplace_back(k);
  for (const auto& k : keys) {
    std::string env = kEnvPrefix;
    for (char c : k) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(env.c_str())) cfg.set(k, v);
  }
  return cfg;
}

std::string describe_keys() {
  RunConfig defaults;
  std::string out;
  for (const auto& [k, v] : defaults.canonical()) out += k + " = " + v + "\n";
  out += "embeddings_path = (empty)\nlexicon_dir = (empty: built-in lexicons)\nworkers = 1\n";
  return out;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const RunConfig& cfg) {
  if (cfg.embedding_provider == "external") {
    return std::make_unique<ExternalEmbeddingProvider>(
        std::make_shared<const EmbeddingTable>(load_embeddings(cfg.embeddings_path)));
  }
  if (cfg.embedding_provider.rfind("hashed:", 0) == 0) {
    return std::make_unique<HashedEmbeddingProvider>(
        static_cast<int>(to_int("embedding_provider", cfg.embedding_provider.substr(7))));
  }
  throw UsageError("embedding_provider must be 'external' or 'hashed:<dim>'");
}

FeatureResources load_resources(const RunConfig& cfg) {
  return cfg.lexicon_dir.empty() ? FeatureResources::builtin() : FeatureResources::load(cfg.lexicon_dir);
}

}  // namespace hatestack::cli
