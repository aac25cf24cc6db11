#pragma once

#include <span>
#include <vector>

#include "hatestack/binary_model.hpp"
#include "hatestack/linalg.hpp"

namespace hatestack {

struct GbtParams {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_leaf = 5;
  /// Ridge term added to the leaf hessian sum (xgboost's lambda).
  double leaf_l2 = 1.0;
};

/// Axis-aligned regression tree stored as a flat node array; node 0 is the
/// root. A sample goes left when x[feature] < threshold.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
};

/// prediction = sigmoid(base_score + learning_rate * sum of tree outputs)
class GbtModel final : public BinaryModel {
 public:
  GbtModel(int input_dim, double base_score, double learning_rate, std::vector<RegressionTree> trees)
      : input_dim_(input_dim), base_score_(base_score), learning_rate_(learning_rate), trees_(std::move(trees)) {}

  std::string_view kind() const noexcept override { return "gbt"; }
  int input_dim() const noexcept override { return input_dim_; }
  double predict_prob(std::span<const double> x) const override;
  double predict_margin(std::span<const double> x) const;
  Envelope to_envelope() const override;
  static GbtModel from_envelope(const Envelope& e);

  double base_score() const noexcept { return base_score_; }
  double learning_rate() const noexcept { return learning_rate_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

  /// Mean training log-loss before the first tree and after each tree
  /// (not serialized).
  std::vector<double> loss_trace;

 private:
  int input_dim_;
  double base_score_;
  double learning_rate_;
  std::vector<RegressionTree> trees_;
};

/// Stagewise boosting on the logistic loss. Each tree is grown level-wise
/// by exact greedy search for the largest variance reduction of the
/// negative-gradient residuals (ties keep the lower feature index and the
/// lower threshold); splits leaving fewer than min_leaf rows on a side are
/// rejected. Leaves take the Newton value sum(r) / (sum(p(1-p)) + leaf_l2).
/// If a tree would raise the training loss its leaves are halved until it
/// does not (or zeroed), so loss_trace never increases.
GbtModel fit_gbt(const Matrix& X, std::span<const int> y, const GbtParams& params = {});

}  // namespace hatestack
