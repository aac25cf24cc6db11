#include "hatestack/archive.hpp"

#include <system_error>

#include "hatestack/digest.hpp"
#include "hatestack/error.hpp"

namespace hatestack {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPlatformFormat = "hatestack-platform";
constexpr const char* kSuperLearnerFormat = "hatestack-superlearner";

void write_envelope(const fs::path& path, const Envelope& e) { write_file_atomic(path, dump_canonical(e.to_json())); }

Envelope read_envelope(const fs::path& path) {
  try {
    return Envelope::from_json(read_json_file(path));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

fs::path staging_path(const fs::path& dir) {
  fs::path p = dir;
  p += ".partial";
  return p;
}

void replace_dir(const fs::path& staged, const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::rename(staged, dir, ec);
  if (ec) throw DataError("cannot move archive into place at " + dir.string() + ": " + ec.message());
}

void check_format(const Json& manifest, const char* format, const fs::path& dir) {
  if (!manifest.is_object() || manifest.value("format", "") != format) {
    throw DataError(dir.string() + ": not a " + std::string(format) + " archive");
  }
  const int v = manifest.value("format_version", 0);
  if (v != kArchiveFormatVersion) {
    throw DataError(dir.string() + ": archive version mismatch (found " + std::to_string(v) + ", supported " +
                    std::to_string(kArchiveFormatVersion) + ")");
  }
}

const char* const kPlatformFiles[] = {"log_odds.json", "pls.json", "standardizer.json", "clf_not_clean.json",
                                      "clf_hate.json", "oof.json"};

void write_platform_files(const PlatformModel& model, const fs::path& dir) {
  const auto& p = model.pipeline;
  if (!p.ordinal) throw DataError("platform model '" + model.platform + "' has no classifier");
  write_envelope(dir / "log_odds.json", p.log_odds.to_envelope());
  write_envelope(dir / "pls.json", p.pls.to_envelope());
  write_envelope(dir / "standardizer.json", p.standardizer.to_envelope());
  write_envelope(dir / "clf_not_clean.json", p.ordinal->clf_not_clean().to_envelope());
  write_envelope(dir / "clf_hate.json", p.ordinal->clf_hate().to_envelope());
  write_envelope(dir / "oof.json", oof_to_envelope(model.oof));

  Json files = Json::object();
  for (const char* name : kPlatformFiles) files[name] = sha256_file(dir / name);
  Json names = Json::array();
  for (auto n : FeatureRecord::names()) names.push_back(std::string(n));
  const Json manifest{{"format", kPlatformFormat},
                      {"format_version", kArchiveFormatVersion},
                      {"platform", model.platform},
                      {"embedding_provider", model.embedding_descriptor},
                      {"fold_fits", model.fold_fits},
                      {"fold_attempts", model.fold_attempts},
                      {"abstain_threshold", p.ordinal->abstain_threshold()},
                      {"config", model.config_snapshot},
                      {"feature_names", names},
                      {"files", files}};
  write_file_atomic(dir / "manifest.json", dump_canonical(manifest));
}

}  // namespace

Envelope oof_to_envelope(const std::map<std::string, SeverityDistribution>& oof) {
  Envelope e;
  e.kind = "oof";
  Json ids = Json::array();
  std::vector<double> p;
  p.reserve(3 * oof.size());
  for (const auto& [id, d] : oof) {
    ids.push_back(id);
    p.push_back(d.p_clean);
    p.push_back(d.p_offensive);
    p.push_back(d.p_hate);
  }
  e.params = Json{{"ids", ids}};
  e.arrays["p"] = std::move(p);
  return e;
}

std::map<std::string, SeverityDistribution> oof_from_envelope(const Envelope& e) {
  e.expect("oof", 1);
  const auto& ids = e.params.at("ids");
  const auto& p = e.array("p");
  if (p.size() != 3 * ids.size()) throw DataError("oof envelope: size mismatch");
  std::map<std::string, SeverityDistribution> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.emplace(ids[i].get<std::string>(), SeverityDistribution{p[3 * i], p[3 * i + 1], p[3 * i + 2]});
  }
  return out;
}

void save_platform_model(const PlatformModel& model, const fs::path& dir) {
  const fs::path staged = staging_path(dir);
  fs::remove_all(staged);
  write_platform_files(model, staged);
  replace_dir(staged, dir);
}

PlatformModel load_platform_model(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("platform archive not found: " + dir.string());
  const Json manifest = read_json_file(dir / "manifest.json");
  check_format(manifest, kPlatformFormat, dir);
  try {
    for (const auto& [name, digest] : manifest.at("files").items()) {
      if (sha256_file(dir / name) != digest.get<std::string>()) {
        throw DataError(dir.string() + ": " + name + " does not match its manifest digest");
      }
    }
    PlatformModel m;
    m.platform = manifest.at("platform").get<std::string>();
    m.embedding_descriptor = manifest.at("embedding_provider").get<std::string>();
    m.fold_fits = manifest.at("fold_fits").get<int>();
    m.fold_attempts = manifest.at("fold_attempts").get<int>();
    m.config_snapshot = manifest.at("config");
    m.pipeline.log_odds = LogOddsModel::from_envelope(read_envelope(dir / "log_odds.json"));
    m.pipeline.pls = PlsModel::from_envelope(read_envelope(dir / "pls.json"));
    m.pipeline.standardizer = Standardizer::from_envelope(read_envelope(dir / "standardizer.json"));
    m.pipeline.ordinal = std::make_shared<OrdinalClassifier>(
        binary_model_from_envelope(read_envelope(dir / "clf_not_clean.json")),
        binary_model_from_envelope(read_envelope(dir / "clf_hate.json")),
        manifest.at("abstain_threshold").get<double>());
    m.oof = oof_from_envelope(read_envelope(dir / "oof.json"));
    if (m.pipeline.standardizer.output_dim() != m.pipeline.ordinal->input_dim()) {
      throw DataError(dir.string() + ": standardizer and classifier dimensions disagree");
    }
    return m;
  } catch (const Json::exception& e) {
    throw DataError(dir.string() + ": malformed manifest: " + e.what());
  }
}

void save_superlearner(const SuperLearner& sl, const ArchiveInfo& info, const fs::path& dir) {
  const fs::path staged = staging_path(dir);
  fs::remove_all(staged);
  Json platforms = Json::array();
  for (const auto& pm : sl.base) {
    write_platform_files(*pm, staged / "platforms" / pm->platform);
    platforms.push_back(pm->platform);
  }
  write_envelope(staged / "meta.json", sl.meta.to_envelope());
  const auto& mp = sl.meta_params;
  const Json manifest{
      {"format", kSuperLearnerFormat},
      {"format_version", kArchiveFormatVersion},
      {"version", sl.version},
      {"platforms", platforms},
      {"meta_input_width", sl.meta_input_width()},
      {"abstain_threshold", sl.abstain_threshold},
      {"meta_params",
       {{"hidden", mp.hidden},
        {"epochs", mp.epochs},
        {"learning_rate", mp.learning_rate},
        {"l2", mp.l2},
        {"batch_size", mp.batch_size},
        {"seed", mp.seed},
        {"activation", mp.activation == Activation::Tanh ? "tanh" : "relu"}}},
      {"embedding", {{"provider", info.embedding_provider}, {"dim", info.embedding_dim}}},
      {"config_hash", info.config_hash},
      {"lexicon_digests", info.lexicon_digests},
      {"meta_digest", sha256_file(staged / "meta.json")}};
  write_file_atomic(staged / "manifest.json", dump_canonical(manifest));
  replace_dir(staged, dir);
}

LoadedSuperLearner load_superlearner(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("superlearner archive not found: " + dir.string());
  const Json manifest = read_json_file(dir / "manifest.json");
  check_format(manifest, kSuperLearnerFormat, dir);
  try {
    LoadedSuperLearner out;
    SuperLearner& sl = out.model;
    sl.version = manifest.at("version").get<int>();
    sl.abstain_threshold = manifest.at("abstain_threshold").get<double>();
    const Json& mp = manifest.at("meta_params");
    sl.meta_params.hidden = mp.at("hidden").get<int>();
    sl.meta_params.epochs = mp.at("epochs").get<int>();
    sl.meta_params.learning_rate = mp.at("learning_rate").get<double>();
    sl.meta_params.l2 = mp.at("l2").get<double>();
    sl.meta_params.batch_size = mp.at("batch_size").get<int>();
    sl.meta_params.seed = mp.at("seed").get<std::uint64_t>();
    sl.meta_params.activation = mp.at("activation").get<std::string>() == "relu" ? Activation::Relu : Activation::Tanh;
    for (const auto& tag : manifest.at("platforms")) {
      sl.base.push_back(std::make_shared<PlatformModel>(load_platform_model(dir / "platforms" / tag.get<std::string>())));
    }
    if (sha256_file(dir / "meta.json") != manifest.at("meta_digest").get<std::string>()) {
      throw DataError(dir.string() + ": meta.json does not match its manifest digest");
    }
    sl.meta = MlpModel::from_envelope(read_envelope(dir / "meta.json"));
    if (static_cast<std::size_t>(sl.meta.input_dim()) != sl.meta_input_width()) {
      throw DataError(dir.string() + ": meta model width does not match the platform count");
    }
    out.info.embedding_provider = manifest.at("embedding").at("provider").get<std::string>();
    out.info.embedding_dim = manifest.at("embedding").at("dim").get<int>();
    out.info.config_hash = manifest.at("config_hash").get<std::string>();
    out.info.lexicon_digests = manifest.at("lexicon_digests");
    return out;
  } catch (const Json::exception& e) {
    throw DataError(dir.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace hatestack
