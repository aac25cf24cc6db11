#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hatestack/archive.hpp"
#include "hatestack/cross_platform.hpp"
#include "hatestack/error.hpp"
#include "hatestack/stack.hpp"
#include "hatestack/synth.hpp"

using namespace hatestack;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  std::map<std::string, std::vector<PreparedMessage>> rows;
  PlatformRegistry models;
  std::vector<PreparedMessage> meta_corpus;
};

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.k_folds = 3;
  cfg.pls_components = 5;
  cfg.learner.gbt.n_trees = 15;
  cfg.seed = 3;
  return cfg;
}

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    const std::vector<std::string> names{"facebook", "gab", "reddit"};
    const auto d = generate_corpus(standard_profiles(names), 150, 2);
    const auto res = FeatureResources::builtin();
    const HashedEmbeddingProvider emb(32);
    const HeuristicTagger tagger;
    for (const auto& p : names) {
      out.rows[p] = prepare_corpus(d.filter_platform(p), res, emb, tagger).messages;
      if (p != "reddit") {
        out.models.push_back(
            std::make_shared<PlatformModel>(train_platform_model(out.rows[p], p, small_config(), emb.describe())));
      }
      out.meta_corpus.insert(out.meta_corpus.end(), out.rows[p].begin(), out.rows[p].end());
    }
    return out;
  }();
  return f;
}

std::vector<PreparedMessage> base_corpus() {
  const auto& f = fixture();
  std::vector<PreparedMessage> out = f.rows.at("facebook");
  out.insert(out.end(), f.rows.at("gab").begin(), f.rows.at("gab").end());
  return out;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hatestack_unit_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("platform model out-of-fold predictions") {
  const auto& f = fixture();
  const auto& fb = *f.models[0];
  CHECK(fb.fold_fits == 3);
  CHECK(fb.oof.size() == f.rows.at("facebook").size());
  int differs = 0;
  for (const auto& m : f.rows.at("facebook")) {
    REQUIRE(fb.trained_on(m.id));
    const auto a = fb.oof.at(m.id);
    const auto b = fb.predict(m);
    differs += a.p_clean != b.p_clean || a.p_hate != b.p_hate;
    CHECK(std::abs(a.p_clean + a.p_offensive + a.p_hate - 1) <= 1e-9);
  }
  CHECK(differs >= 1);
}

TEST_CASE("meta features") {
  const auto& f = fixture();
  const auto& gab_msg = f.rows.at("gab")[4];
  MetaAudit audit;
  const auto mf = assemble_meta_features(gab_msg, f.models, MetaMode::Training, &audit);
  CHECK(mf.logical_size() == 7);
  CHECK(mf.origin_platform == "gab");
  const auto oof = f.models[1]->oof.at(gab_msg.id);
  CHECK(mf.triples[1].p_clean == oof.p_clean);
  CHECK(mf.triples[1].p_offensive == oof.p_offensive);
  CHECK(mf.triples[1].p_hate == oof.p_hate);
  CHECK(mf.triples[0].p_hate == f.models[0]->predict(gab_msg).p_hate);
  CHECK(audit.oof_reads == 1);
  CHECK(audit.full_predictions == 1);
  CHECK(audit.own_row_full_predictions == 0);

  const auto enc = encode_meta(mf, f.models);
  REQUIRE(enc.size() == 8);
  CHECK(enc[6] == 0);
  CHECK(enc[7] == 1);

  auto stranger = gab_msg;
  stranger.id = "gab-unseen";
  CHECK_THROWS_AS(assemble_meta_features(stranger, f.models, MetaMode::Training), DataError);
  const auto& reddit = f.rows.at("reddit")[0];
  const auto inf = encode_meta(assemble_meta_features(reddit, f.models, MetaMode::Inference), f.models);
  CHECK(inf[6] == 0);
  CHECK(inf[7] == 0);
}

TEST_CASE("superlearner contracts") {
  const auto& f = fixture();
  const auto corpus = base_corpus();
  MetaAudit audit;
  const auto rows = assemble_meta_rows(corpus, f.models, &audit);
  CHECK(rows.size() == corpus.size());
  CHECK(audit.oof_reads == corpus.size());
  CHECK(audit.own_row_full_predictions == 0);

  const MlpParams mp{.epochs = 30, .seed = 4};
  const auto sl = train_superlearner(f.models, rows, mp);
  CHECK(sl.version == 1);
  CHECK(sl.meta_input_width() == 8);
  CHECK(sl.meta.input_dim() == 8);
  const auto p1 = sl.predict(corpus[0]);
  const auto p2 = sl.predict(corpus[0]);
  CHECK(p1.dist.p_hate == p2.dist.p_hate);
  CHECK(train_superlearner(f.models, rows, mp).meta.w1() == sl.meta.w1());

  CHECK_THROWS_AS(train_superlearner({f.models[0]}, rows, mp), DataError);
  CHECK_THROWS_AS(train_superlearner(f.models, {}, mp), DataError);
  CHECK_THROWS_AS(add_platform_model(sl, f.models[1], corpus), DataError);

  const auto reddit = std::make_shared<PlatformModel>(
      train_platform_model(f.rows.at("reddit"), "reddit", small_config(), "hashed:32"));
  const auto sl2 = add_platform_model(sl, reddit, f.meta_corpus);
  CHECK(sl2.version == 2);
  CHECK(sl2.meta_input_width() == 12);
  CHECK(sl2.base[0] == sl.base[0]);
  CHECK(assemble_meta_features(f.rows.at("reddit")[0], sl2.base, MetaMode::Training).logical_size() == 10);

  const auto dir = scratch("sl");
  save_superlearner(sl2, {"hashed:32", 32, "abc", Json::object()}, dir);
  const auto loaded = load_superlearner(dir);
  CHECK(loaded.model.version == 2);
  CHECK(loaded.model.platforms() == sl2.platforms());
  CHECK(loaded.info.embedding_dim == 32);
  for (const auto& m : f.meta_corpus) {
    const auto a = sl2.predict(m);
    const auto b = loaded.model.predict(m);
    CHECK(a.dist.p_clean == b.dist.p_clean);
    CHECK(a.dist.p_hate == b.dist.p_hate);
  }
  fs::remove_all(dir);
}

TEST_CASE("meta learner recovers perfect base outputs") {
  auto a = std::make_shared<PlatformModel>();
  a->platform = "a";
  auto b = std::make_shared<PlatformModel>();
  b->platform = "b";
  const PlatformRegistry reg{a, b};
  std::vector<MetaRow> rows;
  for (int i = 0; i < 300; ++i) {
    const auto label = severity_from_code(i % 3);
    std::array<double, 3> p{};
    p[static_cast<std::size_t>(i % 3)] = 1;
    const auto d = SeverityDistribution::from_array(p);
    rows.push_back({{{d, d}, i % 2 ? "a" : "b"}, label});
  }
  const auto sl = train_superlearner(reg, rows, {.epochs = 100, .seed = 1});
  int ok = 0;
  for (const auto& r : rows) {
    const auto p = sl.meta.predict(encode_meta(r.features, reg));
    ok += std::max_element(p.begin(), p.end()) - p.begin() == code(r.label);
  }
  CHECK(ok >= 297);
}

TEST_CASE("platform archive round trip") {
  const auto& f = fixture();
  const auto dir = scratch("pm");
  save_platform_model(*f.models[0], dir);
  const auto back = load_platform_model(dir);
  CHECK(back.platform == "facebook");
  CHECK(back.oof.size() == f.models[0]->oof.size());
  for (const auto& m : f.rows.at("gab")) CHECK(back.predict(m).p_hate == f.models[0]->predict(m).p_hate);

  const auto again = scratch("pm2");
  save_platform_model(back, again);
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream x(entry.path(), std::ios::binary), y(again / entry.path().filename(), std::ios::binary);
    CHECK(std::string(std::istreambuf_iterator<char>(x), {}) == std::string(std::istreambuf_iterator<char>(y), {}));
  }

  auto manifest = Json::parse(std::ifstream(dir / "manifest.json"));
  manifest["format_version"] = 99;
  std::ofstream(dir / "manifest.json") << manifest.dump();
  CHECK_THROWS_AS(load_platform_model(dir), DataError);
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("cross-platform grid") {
  const auto& f = fixture();
  const std::map<std::string, std::vector<PreparedMessage>> tests{{"facebook", f.rows.at("facebook")},
                                                                  {"gab", f.rows.at("gab")}};
  const auto grid = cross_platform_grid(f.models, tests);
  REQUIRE(grid.cells.size() == 2);
  CHECK(grid.cells[0].size() == 2);
  const auto own = evaluate_platform_model(*f.models[1], f.rows.at("gab"));
  CHECK(grid.cells[1][1].accuracy == own.accuracy);
}
