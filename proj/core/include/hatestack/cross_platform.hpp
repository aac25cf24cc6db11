#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hatestack/eval.hpp"
#include "hatestack/stack.hpp"

namespace hatestack {

struct GridCell {
  std::size_t n = 0;
  double accuracy = 0;
  double hate_precision = 0;
  double hate_recall = 0;
  double hate_f1 = 0;
};

/// cells[i][j]: model i on the test set of platforms[j].
struct CrossPlatformGrid {
  std::vector<std::string> models;
  std::vector<std::string> platforms;
  std::vector<std::vector<GridCell>> cells;

  Json to_json() const;
};

/// Labeled messages evaluated by one platform model.
EvalReport evaluate_platform_model(const PlatformModel& model, std::span<const PreparedMessage> test,
                                   AbstainMode mode = AbstainMode::AsError);

/// Throws DataError when a test set is empty or unlabeled.
CrossPlatformGrid cross_platform_grid(const PlatformRegistry& models,
                                      const std::map<std::string, std::vector<PreparedMessage>>& test_sets,
                                      AbstainMode mode = AbstainMode::AsError);

}  // namespace hatestack
