#ifdef HATESTACK_HAVE_CLI

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hatestack/error.hpp"
#include "hatestack/lexicon.hpp"
#include "hatestack/synth.hpp"
#include "hatestack_cli/commands.hpp"
#include "hatestack_cli/config.hpp"

using namespace hatestack;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hatestack");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<Json> jsonl(const fs::path& p) {
  std::vector<Json> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(Json::parse(line));
  }
  return rows;
}

// Two tiny platform archives and a superlearner, built once.
struct Workspace {
  fs::path dir;
  std::string cfg;

  Workspace() : dir(fs::temp_directory_path() / "hatestack_unit_cli") {
    fs::remove_all(dir);
    fs::create_directories(dir);
    cfg = (dir / "run.cfg").string();
    std::ofstream(cfg) << "k_folds = 3\npls_components = 5\ngbt_n_trees = 10\nembedding_provider = hashed:32\n"
                          "meta_epochs = 20\nseed = 5\n";
    run_ok({"--config", cfg, "synth", "--platforms", "facebook,gab", "--n", "150", "--out", path("corpus"),
            "--split"});
    for (const std::string p : {"facebook", "gab"}) {
      run_ok({"--config", cfg, "train-platform", "--data", path("corpus/" + p + ".train.jsonl"), "--out",
              path("models/" + p)});
    }
    run_ok({"--config", cfg, "train-stack", "--archive", path("models/facebook"), path("models/gab"), "--data",
            path("corpus/facebook.train.jsonl"), path("corpus/gab.train.jsonl"), "--out", path("sl")});
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& rel) const { return (dir / rel).string(); }

  static void run_ok(const std::vector<std::string>& args) {
    const auto r = invoke(args);
    INFO(r.err);
    REQUIRE(r.code == 0);
  }
};

const Workspace& workspace() {
  static const Workspace w;
  return w;
}

}  // namespace

TEST_CASE("config hash ignores key order and paths") {
  const auto a = cli::parse_config("seed = 3\nk_folds = 5\n# comment\n\npls_components = 10\n");
  const auto b = cli::parse_config("pls_components=10\nk_folds=5\nseed=3\nlexicon_dir = /tmp/x\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != cli::parse_config("seed = 4\nk_folds = 5\npls_components = 10\n").hash());
  CHECK(a.pipeline.k_folds == 5);
  CHECK(a.pipeline.learner.seed == 3);
  CHECK(a.meta.seed == 3);
  CHECK(a.hash().size() == 64);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(cli::parse_config("colour = red\n"), UsageError);
  CHECK_THROWS_AS(cli::parse_config("k_folds = 1\n").validate(), UsageError);
  CHECK_THROWS_AS(cli::parse_config("train_frac = 1.5\n").validate(), UsageError);
  CHECK_THROWS_AS(cli::parse_config("abstain_threshold = -0.1\n").validate(), UsageError);
  CHECK_THROWS_AS(cli::parse_config("k_folds = ten\n"), UsageError);
  CHECK_THROWS_AS(cli::parse_config("learner = forest\n"), UsageError);
  CHECK_THROWS_AS(cli::parse_config("just words\n"), UsageError);
  CHECK(cli::parse_config("train_frac = 0.6\n").train_frac == 0.6);
}

TEST_CASE("environment overrides the file") {
  const auto file = fs::temp_directory_path() / "hatestack_unit_env.cfg";
  std::ofstream(file) << "k_folds = 4\n";
  ::setenv("HATESTACK_K_FOLDS", "6", 1);
  const auto cfg = cli::load_config(file);
  ::unsetenv("HATESTACK_K_FOLDS");
  CHECK(cfg.pipeline.k_folds == 6);
  CHECK(cli::load_config(file).pipeline.k_folds == 4);
  fs::remove(file);
}

TEST_CASE("shipped lexicon files match the builtin resources") {
  const auto shipped = FeatureResources::load(HATESTACK_DATA_DIR "/lexicons");
  CHECK(shipped.digests() == FeatureResources::builtin().digests());
}

TEST_CASE("cli usage errors") {
  CHECK(invoke({"nonsense"}).code == 1);
  CHECK(invoke({"predict"}).code == 1);
  CHECK(invoke({"config"}).code == 0);
  CHECK(invoke({"config", "--keys"}).out.find("k_folds") != std::string::npos);
  CHECK(invoke({"--seed", "9", "config"}).out.find("seed = 9") != std::string::npos);
}

TEST_CASE("cli missing embedding file") {
  const auto& w = workspace();
  const std::string missing = w.path("nowhere/embeddings.tsv");
  const auto cfg = w.path("external.cfg");
  std::ofstream(cfg) << "embedding_provider = external\nembeddings_path = " << missing << "\n";
  const auto r = invoke({"--config", cfg, "train-platform", "--data", w.path("corpus/gab.train.jsonl"), "--out",
                      w.path("models/ext")});
  CHECK(r.code == 2);
  CHECK(r.err.find(missing) != std::string::npos);
}

TEST_CASE("cli train-stack needs two archives") {
  const auto& w = workspace();
  const auto r = invoke({"--config", w.cfg, "train-stack", "--archive", w.path("models/gab"), "--data",
                      w.path("corpus/gab.train.jsonl"), "--out", w.path("sl1")});
  CHECK(r.code == 1);
  const auto manifest = Json::parse(slurp(w.path("sl/manifest.json")));
  CHECK(manifest.at("version") == 1);
  CHECK(manifest.at("platforms") == Json::array({"facebook", "gab"}));
  CHECK(manifest.at("config_hash") == cli::load_config(fs::path(w.cfg)).hash());
}

TEST_CASE("cli predict and eval") {
  const auto& w = workspace();
  const auto test = load_dataset(w.path("corpus/gab.test.jsonl"));
  std::vector<LabeledMessage> ten(test.messages().begin(), test.messages().begin() + 10);
  write_dataset(Dataset(ten), w.path("ten.jsonl"));
  REQUIRE(invoke({"--config", w.cfg, "predict", "--model", w.path("sl"), "--input", w.path("ten.jsonl"), "--output",
               w.path("ten.pred.jsonl")})
              .code == 0);
  const auto rows = jsonl(w.path("ten.pred.jsonl"));
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].at("id") == ten[i].id);
    const double s = rows[i].at("p_clean").get<double>() + rows[i].at("p_offensive").get<double>() +
                     rows[i].at("p_hate").get<double>();
    CHECK(std::abs(s - 1) <= 1e-9);
  }

  std::vector<LabeledMessage> with_short = ten;
  with_short.push_back({"short-1", "gab", "ok", Severity::Clean});
  write_dataset(Dataset(with_short), w.path("eleven.jsonl"));
  REQUIRE(invoke({"--config", w.cfg, "predict", "--model", w.path("sl"), "--input", w.path("eleven.jsonl"),
               "--output", w.path("eleven.pred.jsonl")})
              .code == 0);
  const auto eleven = jsonl(w.path("eleven.pred.jsonl"));
  REQUIRE(eleven.size() == 11);
  CHECK(eleven.back().contains("skipped"));

  // Truth relabelled to the predictions: accuracy 1.
  std::vector<LabeledMessage> agreed = ten;
  for (std::size_t i = 0; i < agreed.size(); ++i) agreed[i].label = parse_severity(rows[i].at("label").get<std::string>());
  write_dataset(Dataset(agreed), w.path("agreed.jsonl"));
  auto ev = invoke({"--config", w.cfg, "eval", "--predictions", w.path("ten.pred.jsonl"), "--truth",
                 w.path("agreed.jsonl"), "--abstain", "excluded", "--json", w.path("ev.json")});
  REQUIRE(ev.code == 0);
  CHECK(Json::parse(slurp(w.path("ev.json"))).at("accuracy") == 1.0);

  ev = invoke({"--config", w.cfg, "eval", "--predictions", w.path("eleven.pred.jsonl"), "--truth",
            w.path("eleven.jsonl"), "--json", w.path("ev11.json")});
  REQUIRE(ev.code == 0);
  CHECK(Json::parse(slurp(w.path("ev11.json"))).at("skipped") == 1);

  CHECK(invoke({"eval", "--predictions", w.path("eleven.pred.jsonl"), "--truth", w.path("ten.jsonl")}).code == 2);

  const auto grid = invoke({"--config", w.cfg, "eval", "--grid", "--archive", w.path("models/facebook"),
                         w.path("models/gab"), "--data", w.path("corpus/facebook.test.jsonl"),
                         w.path("corpus/gab.test.jsonl"), "--json", w.path("grid.json")});
  REQUIRE(grid.code == 0);
  const auto g = Json::parse(slurp(w.path("grid.json")));
  CHECK(g.at("models").size() == 2);
  CHECK(g.at("platforms").size() == 2);
  CHECK(g.at("cells").size() == 4);
}

TEST_CASE("cli add-platform and agreement") {
  const auto& w = workspace();
  auto r = invoke({"--config", w.cfg, "add-platform", "--model", w.path("sl"), "--archive", w.path("models/gab"),
                "--data", w.path("corpus/gab.train.jsonl"), "--out", w.path("dup")});
  CHECK(r.code == 2);

  const auto a = load_dataset(w.path("corpus/gab.test.jsonl"));
  std::vector<LabeledMessage> flipped = a.messages();
  flipped[0].label = flipped[0].label == Severity::Hate ? Severity::Clean : Severity::Hate;
  write_dataset(Dataset(flipped), w.path("flipped.jsonl"));
  r = invoke({"agreement", "--a", w.path("corpus/gab.test.jsonl"), "--b", w.path("flipped.jsonl")});
  REQUIRE(r.code == 0);
  const auto rep = Json::parse(r.out);
  CHECK(rep.at("percent_agreement").get<double>() == doctest::Approx(1.0 - 1.0 / static_cast<double>(a.size())));
  CHECK(rep.at("cohen_kappa").get<double>() < 1);
}

#endif
