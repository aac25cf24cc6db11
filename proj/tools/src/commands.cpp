#include "hatestack_cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "hatestack/archive.hpp"
#include "hatestack/cross_platform.hpp"
#include "hatestack/error.hpp"
#include "hatestack/parallel.hpp"
#include "hatestack/rng.hpp"
#include "hatestack/serialize.hpp"
#include "hatestack/synth.hpp"
#include "hatestack_cli/config.hpp"

namespace hatestack::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool verbose = false;
};

class Logger {
 public:
  Logger(std::ostream& err, bool verbose) : err_(err), verbose_(verbose), start_(std::chrono::steady_clock::now()) {}

  void operator()(const std::string& msg) const {
    if (!verbose_) return;
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    err_ << "[" << std::fixed << std::setprecision(1) << t << "s] " << msg << "\n";
  }

 private:
  std::ostream& err_;
  bool verbose_;
  std::chrono::steady_clock::time_point start_;
};

RunConfig resolve_config(const Globals& g) {
  RunConfig cfg = load_config(g.config_path ? std::optional<fs::path>(*g.config_path) : std::nullopt);
  if (g.seed) cfg.set("seed", std::to_string(*g.seed));
  if (g.workers) cfg.set("workers", std::to_string(*g.workers));
  cfg.validate();
  return cfg;
}

Dataset load_all(const std::vector<std::string>& paths) {
  std::vector<Dataset> parts;
  parts.reserve(paths.size());
  for (const auto& p : paths) parts.push_back(load_dataset(p));
  return parts.size() == 1 ? std::move(parts.front()) : Dataset::concat(parts);
}

Json record_features(const FeatureRecord& r) {
  Json out = Json::object();
  const auto values = r.to_array();
  for (std::size_t i = 0; i < FeatureRecord::kSize; ++i) out[std::string(FeatureRecord::names()[i])] = values[i];
  return out;
}

Json label_json(const std::optional<Severity>& s) {
  return s ? Json(std::string(to_string(*s))) : Json(nullptr);
}

std::string format_row(const std::string& name, const ClassMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %9.4f %9.4f %9.4f %8zu %9s", name.c_str(), m.precision, m.recall, m.f1,
                m.support, m.auc ? std::to_string(*m.auc).substr(0, 6).c_str() : "n/a");
  return buf;
}

void print_report_table(const EvalReport& r, std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "accuracy   %.4f +/- %.4f  (n=%zu, abstained=%zu, mode=%s)\n", r.accuracy,
                r.accuracy_half_width, r.n, r.abstentions, std::string(to_string(r.mode)).c_str());
  out << buf;
  out << "class      precision    recall        f1  support       auc\n";
  for (int c = 0; c < kNumClasses; ++c) {
    out << format_row(std::string(to_string(severity_from_code(c))), r.per_class[c]) << "\n";
  }
  std::snprintf(buf, sizeof buf, "macro_f1   %.4f\nclean->hate %.4f  hate->clean %.4f  minor_share %.4f\n",
                r.macro_f1, r.ordinal.clean_as_hate_rate, r.ordinal.hate_as_clean_rate, r.ordinal.minor_error_rate);
  out << buf;
}

void print_grid_table(const CrossPlatformGrid& g, std::ostream& out) {
  out << "rows: model, columns: test platform; cells: accuracy / hate F1\n";
  out << std::left << std::setw(14) << "model";
  for (const auto& p : g.platforms) out << std::setw(18) << p;
  out << "\n";
  for (std::size_t i = 0; i < g.models.size(); ++i) {
    out << std::setw(14) << g.models[i];
    for (std::size_t j = 0; j < g.platforms.size(); ++j) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.4f / %.4f", g.cells[i][j].accuracy, g.cells[i][j].hate_f1);
      out << std::setw(18) << buf;
    }
    out << "\n";
  }
  out << std::right;
}

PlatformRegistry load_archives(const std::vector<std::string>& dirs) {
  PlatformRegistry reg;
  for (const auto& d : dirs) reg.push_back(std::make_shared<const PlatformModel>(load_platform_model(d)));
  return reg;
}

void require_descriptor(const PlatformModel& m, const std::string& expected) {
  if (m.embedding_descriptor != expected) {
    throw DataError("platform archive '" + m.platform + "' was built with embedding provider '" +
                    m.embedding_descriptor + "' but the configuration uses '" + expected + "'");
  }
}

std::unique_ptr<EmbeddingProvider> provider_for_archive(const ArchiveInfo& info, const RunConfig& cfg) {
  RunConfig c = cfg;
  c.embedding_provider = info.embedding_provider;
  auto p = make_embedding_provider(c);
  if (p->dim() != info.embedding_dim) {
    throw DataError("embedding dimension " + std::to_string(p->dim()) + " does not match the archive's " +
                    std::to_string(info.embedding_dim));
  }
  return p;
}

std::string meta_metrics(const SuperLearner& sl, std::span<const MetaRow> rows, Json& out) {
  std::vector<Prediction> preds;
  std::vector<Severity> truth;
  preds.reserve(rows.size());
  for (const auto& r : rows) {
    const auto p = sl.meta.predict(encode_meta(r.features, sl.base));
    const SeverityDistribution d{p[0], p[1], p[2]};
    preds.push_back({d, decide(d, sl.abstain_threshold)});
    truth.push_back(r.label);
  }
  const auto report = evaluate(preds, truth);
  out["meta_training"] = report.to_json();
  std::ostringstream os;
  os << "meta training accuracy " << report.accuracy;
  return os.str();
}

// prep

struct PrepArgs {
  std::string input;
  std::string output;
};

void cmd_prep(const PrepArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const Dataset d = load_dataset(a.input);
  const FeatureResources res = load_resources(cfg);
  log("prep: " + std::to_string(d.size()) + " messages");
  std::string text;
  std::size_t kept = 0;
  for (const auto& m : d.messages()) {
    Json rec{{"id", m.id}, {"platform", m.platform}, {"label", label_json(m.label)}};
    if (const auto why = rejection_reason(m.text)) {
      rec["skipped"] = *why;
    } else {
      try {
        const CleanMessage cm = clean_text(m);
        rec["clean_text"] = clean_string(cm);
        rec["features"] = record_features(base_features(cm, m.text, res));
        ++kept;
      } catch (const DataError& e) {
        rec["skipped"] = e.what();
      }
    }
    text += rec.dump() + "\n";
  }
  write_file_atomic(a.output, text);
  out << Json{{"input", d.size()}, {"kept", kept}, {"skipped", d.size() - kept}, {"output", a.output}}.dump()
      << "\n";
}

// synth

struct SynthArgs {
  std::vector<std::string> platforms;
  int n = 2000;
  std::string out_dir;
  bool split = false;
};

void cmd_synth(const SynthArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const auto names = a.platforms.empty() ? standard_profile_names() : a.platforms;
  const auto profiles = standard_profiles(names);
  const std::uint64_t seed = cfg.pipeline.seed;
  const Dataset d = generate_corpus(profiles, a.n, seed);
  fs::create_directories(a.out_dir);
  Json files = Json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& p = names[i];
    const Dataset part = d.filter_platform(p);
    const fs::path base = fs::path(a.out_dir) / p;
    write_file_atomic(base.string() + ".jsonl", to_jsonl(part));
    files.push_back(p + ".jsonl");
    if (a.split) {
      const auto s = stratified_split(part, cfg.train_frac, Rng::derive(seed, 100 + i));
      write_file_atomic(base.string() + ".train.jsonl", to_jsonl(s.train));
      write_file_atomic(base.string() + ".test.jsonl", to_jsonl(s.test));
      files.push_back(p + ".train.jsonl");
      files.push_back(p + ".test.jsonl");
    }
    log("synth: wrote " + p);
  }
  Json manifest = synth_manifest(profiles, a.n, seed);
  if (a.split) manifest["train_frac"] = cfg.train_frac;
  write_file_atomic(fs::path(a.out_dir) / "manifest.json", dump_canonical(manifest));
  out << Json{{"out_dir", a.out_dir}, {"files", files}, {"messages", d.size()}}.dump() << "\n";
}

// train-platform

struct TrainPlatformArgs {
  std::vector<std::string> data;
  std::string platform;
  std::string out;
};

void cmd_train_platform(const TrainPlatformArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  Dataset d = load_all(a.data);
  std::string platform = a.platform;
  if (platform.empty()) {
    if (d.platform_counts().size() != 1) {
      throw UsageError("train-platform: the data spans several platforms; pass --platform");
    }
    platform = d.platform_counts().begin()->first;
  } else {
    d = d.filter_platform(platform);
  }
  if (d.empty()) throw DataError("train-platform: no messages for platform '" + platform + "'");
  const auto provider = make_embedding_provider(cfg);
  const FeatureResources res = load_resources(cfg);
  const HeuristicTagger tagger;
  log("train-platform: preparing " + std::to_string(d.size()) + " messages");
  const PreparedCorpus pc = prepare_corpus(d, res, *provider, tagger, {}, cfg.workers);
  log("train-platform: fitting " + platform);
  const PlatformModel model = train_platform_model(pc.messages, platform, cfg.pipeline, provider->describe());
  save_platform_model(model, a.out);

  std::vector<Prediction> preds;
  std::vector<Severity> truth;
  for (const auto& m : pc.messages) {
    if (!m.label) continue;
    const auto& dist = model.oof.at(m.id);
    preds.push_back({dist, decide(dist, cfg.pipeline.abstain_threshold)});
    truth.push_back(*m.label);
  }
  Json skipped = Json::array();
  for (const auto& [id, why] : pc.skipped) skipped.push_back({{"id", id}, {"reason", why}});
  const Json summary{{"platform", platform},
                     {"archive", a.out},
                     {"n_train", pc.messages.size()},
                     {"skipped", skipped},
                     {"fold_fits", model.fold_fits},
                     {"fold_attempts", model.fold_attempts},
                     {"pls_components", model.pipeline.pls.n_components()},
                     {"embedding_provider", model.embedding_descriptor},
                     {"config_hash", cfg.hash()},
                     {"out_of_fold", evaluate(preds, truth, cfg.abstain_mode).to_json()}};
  out << summary.dump(2) << "\n";
}

// train-stack

struct TrainStackArgs {
  std::vector<std::string> archives;
  std::vector<std::string> data;
  std::string out;
};

void cmd_train_stack(const TrainStackArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  if (a.archives.size() < 2) throw UsageError("train-stack: stacking needs at least 2 platform archives");
  const auto provider = make_embedding_provider(cfg);
  PlatformRegistry reg = load_archives(a.archives);
  for (const auto& m : reg) require_descriptor(*m, provider->describe());
  const Dataset d = load_all(a.data);
  const FeatureResources res = load_resources(cfg);
  const HeuristicTagger tagger;
  log("train-stack: preparing " + std::to_string(d.size()) + " messages");
  const PreparedCorpus pc = prepare_corpus(d, res, *provider, tagger, {}, cfg.workers);
  MetaAudit audit;
  const auto rows = assemble_meta_rows(pc.messages, reg, &audit, cfg.workers);
  log("train-stack: fitting meta learner on " + std::to_string(rows.size()) + " rows");
  const SuperLearner sl = train_superlearner(reg, rows, cfg.meta, cfg.pipeline.abstain_threshold);
  const ArchiveInfo info{provider->describe(), provider->dim(), cfg.hash(), res.digests()};
  save_superlearner(sl, info, a.out);

  Json summary{{"archive", a.out},
               {"version", sl.version},
               {"platforms", sl.platforms()},
               {"meta_rows", rows.size()},
               {"meta_input_width", sl.meta_input_width()},
               {"config_hash", info.config_hash},
               {"audit",
                {{"oof_reads", audit.oof_reads},
                 {"full_predictions", audit.full_predictions},
                 {"own_row_full_predictions", audit.own_row_full_predictions}}}};
  log(meta_metrics(sl, rows, summary));
  out << summary.dump(2) << "\n";
}

// predict

struct PredictArgs {
  std::string model;
  std::string input;
  std::string output;
};

void cmd_predict(const PredictArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const LoadedSuperLearner loaded = load_superlearner(a.model);
  const FeatureResources res = load_resources(cfg);
  if (res.digests() != loaded.info.lexicon_digests) {
    throw DataError("predict: the configured lexicons differ from those recorded in " + a.model);
  }
  const auto provider = provider_for_archive(loaded.info, cfg);
  const Dataset d = load_dataset(a.input);
  const HeuristicTagger tagger;
  log("predict: " + std::to_string(d.size()) + " messages");

  std::vector<Json> records(d.size());
  parallel_for(d.size(), cfg.workers, [&](std::size_t i) {
    const LabeledMessage& m = d[i];
    Json rec{{"id", m.id}};
    if (const auto why = rejection_reason(m.text)) {
      rec["skipped"] = *why;
    } else {
      try {
        const PreparedMessage pm = prepare_message(m, res, *provider, tagger);
        const Prediction p = loaded.model.predict(pm);
        rec["p_clean"] = p.dist.p_clean;
        rec["p_offensive"] = p.dist.p_offensive;
        rec["p_hate"] = p.dist.p_hate;
        rec["label"] = std::string(to_string(p.decision.label));
        rec["abstained"] = p.decision.abstained;
      } catch (const DataError& e) {
        rec["skipped"] = e.what();
      }
    }
    records[i] = std::move(rec);
  });
  std::string text;
  std::size_t skipped = 0;
  for (const auto& r : records) {
    skipped += r.contains("skipped");
    text += r.dump() + "\n";
  }
  write_file_atomic(a.output, text);
  out << Json{{"output", a.output}, {"records", records.size()}, {"skipped", skipped}}.dump() << "\n";
}

// eval

struct EvalArgs {
  std::string predictions;
  std::string truth;
  std::optional<std::string> abstain;
  bool grid = false;
  std::vector<std::string> archives;
  std::vector<std::string> data;
  std::string json_out;
};

Prediction prediction_from_record(const Json& r, double threshold) {
  const SeverityDistribution dist{r.at("p_clean").get<double>(), r.at("p_offensive").get<double>(),
                                  r.at("p_hate").get<double>()};
  Decision dec = decide(dist, threshold);
  if (r.contains("label")) {
    const auto label = parse_severity(r.at("label").get<std::string>());
    if (!label) throw DataError("eval: bad label in prediction record '" + r.at("id").get<std::string>() + "'");
    dec.label = *label;
  }
  if (r.contains("abstained")) dec.abstained = r.at("abstained").get<bool>();
  return {dist, dec};
}

void cmd_eval(const EvalArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const AbstainMode mode = a.abstain ? parse_abstain_mode(*a.abstain) : cfg.abstain_mode;
  Json report;
  if (a.grid) {
    if (a.archives.empty() || a.data.empty()) throw UsageError("eval --grid needs --archive and --data");
    const auto provider = make_embedding_provider(cfg);
    const PlatformRegistry reg = load_archives(a.archives);
    for (const auto& m : reg) require_descriptor(*m, provider->describe());
    const Dataset d = load_all(a.data);
    const FeatureResources res = load_resources(cfg);
    const HeuristicTagger tagger;
    PreparedCorpus pc = prepare_corpus(d, res, *provider, tagger, {}, cfg.workers);
    std::map<std::string, std::vector<PreparedMessage>> tests;
    for (auto& m : pc.messages) tests[m.platform].push_back(std::move(m));
    log("eval: grid over " + std::to_string(reg.size()) + " models and " + std::to_string(tests.size()) +
        " platforms");
    const CrossPlatformGrid g = cross_platform_grid(reg, tests, mode);
    print_grid_table(g, out);
    report = g.to_json();
  } else {
    if (a.predictions.empty() || a.truth.empty()) throw UsageError("eval needs --predictions and --truth");
    const Dataset truth = load_dataset(a.truth);
    std::map<std::string, Severity> labels;
    for (const auto& m : truth.messages()) {
      if (!m.label) throw DataError("eval: truth record '" + m.id + "' is unlabeled");
      labels.emplace(m.id, *m.label);
    }
    std::vector<Prediction> preds;
    std::vector<Severity> gold;
    std::set<std::string> seen;
    std::size_t skipped = 0;
    std::istringstream lines(read_file(a.predictions));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      Json r;
      try {
        r = Json::parse(line);
      } catch (const Json::exception& e) {
        throw DataError(a.predictions + ":" + std::to_string(line_no) + ": " + e.what());
      }
      const std::string id = r.at("id").get<std::string>();
      const auto it = labels.find(id);
      if (it == labels.end()) throw DataError("eval: prediction id '" + id + "' has no truth record");
      if (!seen.insert(id).second) throw DataError("eval: duplicate prediction id '" + id + "'");
      if (r.contains("skipped")) {
        ++skipped;
        continue;
      }
      preds.push_back(prediction_from_record(r, cfg.pipeline.abstain_threshold));
      gold.push_back(it->second);
    }
    for (const auto& [id, _] : labels) {
      if (!seen.count(id)) throw DataError("eval: truth id '" + id + "' has no prediction");
    }
    const EvalReport r = evaluate(preds, gold, mode);
    print_report_table(r, out);
    report = r.to_json();
    report["skipped"] = skipped;
  }
  if (!a.json_out.empty()) write_file_atomic(a.json_out, dump_canonical(report));
  else out << report.dump(2) << "\n";
}

// add-platform

struct AddPlatformArgs {
  std::string model;
  std::string archive;
  std::vector<std::string> data;
  std::string out;
};

void cmd_add_platform(const AddPlatformArgs& a, const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const LoadedSuperLearner loaded = load_superlearner(a.model);
  auto added = std::make_shared<const PlatformModel>(load_platform_model(a.archive));
  require_descriptor(*added, loaded.info.embedding_provider);
  const FeatureResources res = load_resources(cfg);
  if (res.digests() != loaded.info.lexicon_digests) {
    throw DataError("add-platform: the configured lexicons differ from those recorded in " + a.model);
  }
  const auto provider = provider_for_archive(loaded.info, cfg);
  const Dataset d = load_all(a.data);
  const HeuristicTagger tagger;
  log("add-platform: preparing " + std::to_string(d.size()) + " messages");
  const PreparedCorpus pc = prepare_corpus(d, res, *provider, tagger, {}, cfg.workers);
  MetaAudit audit;
  const SuperLearner sl = add_platform_model(loaded.model, added, pc.messages, &audit, cfg.workers);
  save_superlearner(sl, loaded.info, a.out);
  out << Json{{"archive", a.out},
              {"version", sl.version},
              {"platforms", sl.platforms()},
              {"meta_input_width", sl.meta_input_width()},
              {"audit",
               {{"oof_reads", audit.oof_reads},
                {"full_predictions", audit.full_predictions},
                {"own_row_full_predictions", audit.own_row_full_predictions}}}}
             .dump(2)
      << "\n";
}

// agreement

struct AgreementArgs {
  std::string a;
  std::string b;
};

void cmd_agreement(const AgreementArgs& args, std::ostream& out) {
  const Dataset a = load_dataset(args.a);
  const Dataset b = load_dataset(args.b);
  std::map<std::string, Severity> second;
  for (const auto& m : b.messages()) {
    if (!m.label) throw DataError("agreement: '" + m.id + "' is unlabeled in " + args.b);
    second.emplace(m.id, *m.label);
  }
  std::vector<Severity> la;
  std::vector<Severity> lb;
  for (const auto& m : a.messages()) {
    if (!m.label) throw DataError("agreement: '" + m.id + "' is unlabeled in " + args.a);
    const auto it = second.find(m.id);
    if (it == second.end()) throw DataError("agreement: '" + m.id + "' is missing from " + args.b);
    la.push_back(*m.label);
    lb.push_back(it->second);
  }
  if (la.size() != second.size()) throw DataError("agreement: " + args.b + " has ids missing from " + args.a);
  out << agreement(la, lb).to_json().dump(2) << "\n";
}

int exit_code(ErrorKind k) { return static_cast<int>(k); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hatestack: multi-platform ordinal hate speech detection"};
  app.name(args.empty() ? "hatestack" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Flat key = value configuration file");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", g.verbose, "Progress on stderr");

  bool show_keys = false;
  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration and its hash");
  config_cmd->add_flag("--keys", show_keys, "List the documented keys and defaults");

  PrepArgs prep;
  auto* prep_cmd = app.add_subcommand("prep", "Clean messages and emit base features as JSONL");
  prep_cmd->add_option("--input", prep.input)->required();
  prep_cmd->add_option("--output", prep.output)->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic multi-platform corpus");
  synth_cmd->add_option("--platforms", synth.platforms, "Profile names")->delimiter(',');
  synth_cmd->add_option("--n", synth.n, "Messages per platform");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_flag("--split", synth.split, "Also write stratified train/test files");

  TrainPlatformArgs tp;
  auto* tp_cmd = app.add_subcommand("train-platform", "Fit one platform model");
  tp_cmd->add_option("--data", tp.data, "Training dataset(s)")->required();
  tp_cmd->add_option("--platform", tp.platform, "Platform tag (required when the data is mixed)");
  tp_cmd->add_option("--out", tp.out, "Archive directory")->required();

  TrainStackArgs ts;
  auto* ts_cmd = app.add_subcommand("train-stack", "Fit the superlearner over platform archives");
  ts_cmd->add_option("--archive", ts.archives, "Platform archive directories")->required();
  ts_cmd->add_option("--data", ts.data, "Training datasets of the platform models")->required();
  ts_cmd->add_option("--out", ts.out, "Superlearner archive directory")->required();

  PredictArgs pr;
  auto* pr_cmd = app.add_subcommand("predict", "Score messages with a superlearner archive");
  pr_cmd->add_option("--model", pr.model)->required();
  pr_cmd->add_option("--input", pr.input)->required();
  pr_cmd->add_option("--output", pr.output)->required();

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Metrics table for predictions, or a cross-platform grid");
  ev_cmd->add_option("--predictions", ev.predictions);
  ev_cmd->add_option("--truth", ev.truth);
  ev_cmd->add_option("--abstain", ev.abstain, "as_error or excluded");
  ev_cmd->add_flag("--grid", ev.grid, "Evaluate every --archive on every platform in --data");
  ev_cmd->add_option("--archive", ev.archives);
  ev_cmd->add_option("--data", ev.data);
  ev_cmd->add_option("--json", ev.json_out, "Write the JSON report here instead of stdout");

  AddPlatformArgs ap;
  auto* ap_cmd = app.add_subcommand("add-platform", "Add a platform model and refit the meta learner");
  ap_cmd->add_option("--model", ap.model, "Existing superlearner archive")->required();
  ap_cmd->add_option("--archive", ap.archive, "New platform archive")->required();
  ap_cmd->add_option("--data", ap.data, "Meta training datasets")->required();
  ap_cmd->add_option("--out", ap.out, "New superlearner archive directory")->required();

  AgreementArgs ag;
  auto* ag_cmd = app.add_subcommand("agreement", "Intercoder agreement between two labelled files");
  ag_cmd->add_option("--a", ag.a)->required();
  ag_cmd->add_option("--b", ag.b)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ErrorKind::Usage);
  }

  try {
    const RunConfig cfg = resolve_config(g);
    const Logger log(err, g.verbose);
    if (*config_cmd) {
      if (show_keys) {
        out << describe_keys();
      } else {
        for (const auto& [k, v] : cfg.canonical()) out << k << " = " << v << "\n";
        out << "# config_hash " << cfg.hash() << "\n";
      }
    } else if (*prep_cmd) {
      cmd_prep(prep, cfg, out, log);
    } else if (*synth_cmd) {
      cmd_synth(synth, cfg, out, log);
    } else if (*tp_cmd) {
      cmd_train_platform(tp, cfg, out, log);
    } else if (*ts_cmd) {
      cmd_train_stack(ts, cfg, out, log);
    } else if (*pr_cmd) {
      cmd_predict(pr, cfg, out, log);
    } else if (*ev_cmd) {
      cmd_eval(ev, cfg, out, log);
    } else if (*ap_cmd) {
      cmd_add_platform(ap, cfg, out, log);
    } else if (*ag_cmd) {
      cmd_agreement(ag, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::Data);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::Data);
  }
  return 0;
}

}  // namespace hatestack::cli
