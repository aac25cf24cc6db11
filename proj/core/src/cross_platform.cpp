#include "hatestack/cross_platform.hpp"

#include "hatestack/error.hpp"

namespace hatestack {

EvalReport evaluate_platform_model(const PlatformModel& model, std::span<const PreparedMessage> test,
                                   AbstainMode mode) {
  if (test.empty()) throw DataError("evaluation of '" + model.platform + "': empty test set");
  const double threshold = model.pipeline.ordinal->abstain_threshold();
  std::vector<Prediction> preds;
  std::vector<Severity> truth;
  preds.reserve(test.size());
  for (const auto& m : test) {
    if (!m.label) throw DataError("evaluation: message '" + m.id + "' is unlabeled");
    const SeverityDistribution d = model.predict(m);
    preds.push_back({d, decide(d, threshold)});
    truth.push_back(*m.label);
  }
  return evaluate(preds, truth, mode);
}

CrossPlatformGrid cross_platform_grid(const PlatformRegistry& models,
                                      const std::map<std::string, std::vector<PreparedMessage>>& test_sets,
                                      AbstainMode mode) {
  CrossPlatformGrid g;
  for (const auto& pm : models) g.models.push_back(pm->platform);
  for (const auto& [tag, rows] : test_sets) g.platforms.push_back(tag);
  for (const auto& pm : models) {
    auto& row = g.cells.emplace_back();
    for (const auto& [tag, rows] : test_sets) {
      const EvalReport r = evaluate_platform_model(*pm, rows, mode);
      const auto& hate = r.per_class[code(Severity::Hate)];
      row.push_back({r.n, r.accuracy, hate.precision, hate.recall, hate.f1});
    }
  }
  return g;
}

Json CrossPlatformGrid::to_json() const {
  Json cells_json = Json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < cells[i].size(); ++j) {
      const auto& c = cells[i][j];
      cells_json.push_back(Json{{"model", models[i]},
                                {"platform", platforms[j]},
                                {"n", c.n},
                                {"accuracy", c.accuracy},
                                {"hate_precision", c.hate_precision},
                                {"hate_recall", c.hate_recall},
                                {"hate_f1", c.hate_f1}});
    }
  }
  return Json{{"models", models}, {"platforms", platforms}, {"cells", cells_json}};
}

}  // namespace hatestack
