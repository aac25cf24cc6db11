#include "hatestack/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hatestack/error.hpp"

namespace hatestack {

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature >= 0) {
      d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
      best = std::max(best, d[i] + 1);
    }
  }
  return best;
}

double GbtModel::predict_margin(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw DataError("gbt: expected " + std::to_string(input_dim_) + " features, got " + std::to_string(x.size()));
  }
  double sum = 0;
  for (const auto& t : trees_) sum += t.predict(x);
  return base_score_ + learning_rate_ * sum;
}

double GbtModel::predict_prob(std::span<const double> x) const { return sigmoid(predict_margin(x)); }

Envelope GbtModel::to_envelope() const {
  Envelope e;
  e.kind = "gbt";
  e.params = Json{{"input_dim", input_dim_}, {"base_score", base_score_}, {"learning_rate", learning_rate_},
                  {"n_trees", trees_.size()}};
  std::vector<double> sizes, feature, threshold, left, right, value;
  for (const auto& t : trees_) {
    sizes.push_back(static_cast<double>(t.nodes.size()));
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
  }
  e.arrays["tree_sizes"] = std::move(sizes);
  e.arrays["feature"] = std::move(feature);
  e.arrays["threshold"] = std::move(threshold);
  e.arrays["left"] = std::move(left);
  e.arrays["right"] = std::move(right);
  e.arrays["value"] = std::move(value);
  return e;
}

GbtModel GbtModel::from_envelope(const Envelope& e) {
  e.expect("gbt", 1);
  const auto& sizes = e.array("tree_sizes");
  const auto& feature = e.array("feature");
  const auto& threshold = e.array("threshold");
  const auto& left = e.array("left");
  const auto& right = e.array("right");
  const auto& value = e.array("value");
  const auto total = static_cast<std::size_t>(std::accumulate(sizes.begin(), sizes.end(), 0.0));
  if (feature.size() != total || threshold.size() != total || left.size() != total || right.size() != total ||
      value.size() != total) {
    throw DataError("gbt envelope: node array size mismatch");
  }
  const int input_dim = e.params.at("input_dim").get<int>();
  std::vector<RegressionTree> trees;
  std::size_t offset = 0;
  for (double s : sizes) {
    RegressionTree t;
    const auto count = static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < count; ++i, ++offset) {
      RegressionTree::Node n{static_cast<int>(feature[offset]), threshold[offset], static_cast<int>(left[offset]),
                             static_cast<int>(right[offset]), value[offset]};
      const bool leaf = n.feature < 0;
      if (!leaf && (n.feature >= input_dim || n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) ||
                    n.left >= static_cast<int>(count) || n.right >= static_cast<int>(count))) {
        throw DataError("gbt envelope: malformed tree");
      }
      t.nodes.push_back(n);
    }
    if (t.nodes.empty()) throw DataError("gbt envelope: empty tree");
    trees.push_back(std::move(t));
  }
  return GbtModel(input_dim, e.params.at("base_score").get<double>(), e.params.at("learning_rate").get<double>(),
                  std::move(trees));
}

namespace {

double mean_log_loss(std::span<const double> margin, std::span<const int> y) {
  double loss = 0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const double z = margin[i];
    const double sp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += sp - (y[i] ? z : 0.0);
  }
  return loss / static_cast<double>(margin.size());
}

struct SplitCandidate {
  double gain = 0;
  int feature = -1;
  double threshold = 0;
};

struct ScanState {
  double sum = 0;
  int count = 0;
  double last = 0;
};

/// Grows one tree on residuals `resid` with hessians `hess`.
RegressionTree grow_tree(const Matrix& X, const std::vector<std::vector<int>>& sorted_rows,
                         std::span<const double> resid, std::span<const double> hess, const GbtParams& params) {
  const auto n = static_cast<int>(X.rows());
  const auto d = static_cast<int>(X.cols());
  RegressionTree tree;
  tree.nodes.push_back({});
  std::vector<int> node_of(n, 0);

  struct Stats {
    double sum = 0;
    double hess = 0;
    int count = 0;
  };
  std::vector<int> frontier = {0};
  for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    std::vector<Stats> stats(tree.nodes.size());
    for (int i = 0; i < n; ++i) {
      stats[node_of[i]].sum += resid[i];
      stats[node_of[i]].count += 1;
    }
    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot[frontier[s]] = static_cast<int>(s);
    std::vector<SplitCandidate> best(frontier.size());

    std::vector<ScanState> scan(frontier.size());
    for (int f = 0; f < d; ++f) {
      std::fill(scan.begin(), scan.end(), ScanState{});
      for (int row : sorted_rows[f]) {
        const int s = slot[node_of[row]];
        if (s < 0) continue;
        const double x = X(row, f);
        ScanState& st = scan[s];
        const Stats& tot = stats[frontier[s]];
        if (st.count >= params.min_leaf && tot.count - st.count >= params.min_leaf && x > st.last) {
          const double right_sum = tot.sum - st.sum;
          const int right_count = tot.count - st.count;
          const double gain = st.sum * st.sum / st.count + right_sum * right_sum / right_count -
                              tot.sum * tot.sum / tot.count;
          if (gain > best[s].gain + 1e-12) best[s] = {gain, f, 0.5 * (st.last + x)};
        }
        st.sum += resid[row];
        st.count += 1;
        st.last = x;
      }
    }

    std::vector<int> next;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      if (best[s].feature < 0) continue;
      const int id = frontier[s];
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      tree.nodes[id].feature = best[s].feature;
      tree.nodes[id].threshold = best[s].threshold;
      tree.nodes[id].left = left;
      tree.nodes[id].right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (int i = 0; i < n; ++i) {
      const auto& node = tree.nodes[node_of[i]];
      if (node.feature >= 0) node_of[i] = X(i, node.feature) < node.threshold ? node.left : node.right;
    }
    frontier = std::move(next);
  }

  std::vector<double> rsum(tree.nodes.size(), 0), hsum(tree.nodes.size(), 0);
  for (int i = 0; i < n; ++i) {
    rsum[node_of[i]] += resid[i];
    hsum[node_of[i]] += hess[i];
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].feature < 0) tree.nodes[k].value = rsum[k] / (hsum[k] + params.leaf_l2);
  }
  return tree;
}

}  // namespace

GbtModel fit_gbt(const Matrix& X, std::span<const int> y, const GbtParams& params) {
  const auto n = static_cast<int>(X.rows());
  if (n == 0) throw DataError("fit_gbt: empty training set");
  if (static_cast<int>(y.size()) != n) throw DataError("fit_gbt: label count mismatch");
  if (params.n_trees < 0 || params.max_depth < 1 || params.min_leaf < 1 || !(params.learning_rate > 0)) {
    throw UsageError("fit_gbt: invalid parameters");
  }
  double rate = 0;
  for (int v : y) rate += v;
  rate = std::clamp(rate / n, 1e-6, 1.0 - 1e-6);
  const double base = std::log(rate / (1.0 - rate));

  std::vector<std::vector<int>> sorted_rows(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& order = sorted_rows[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
  }

  std::vector<double> margin(n, base), resid(n), hess(n), trial(n);
  std::vector<RegressionTree> trees;
  std::vector<double> trace = {mean_log_loss(margin, y)};
  for (int t = 0; t < params.n_trees; ++t) {
    for (int i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      resid[i] = y[i] - p;
      hess[i] = p * (1 - p);
    }
    RegressionTree tree = grow_tree(X, sorted_rows, resid, hess, params);

    std::vector<double> contrib(n);
    for (int i = 0; i < n; ++i) contrib[i] = tree.predict(row_span(X, i));
    double scale = 1.0;
    double loss = 0;
    for (int attempt = 0; attempt <= 30; ++attempt) {
      for (int i = 0; i < n; ++i) trial[i] = margin[i] + params.learning_rate * scale * contrib[i];
      loss = mean_log_loss(trial, y);
      if (loss <= trace.back()) break;
      scale *= 0.5;
    }
    if (!(loss <= trace.back())) {
      scale = 0;
      loss = trace.back();
      trial = margin;
    }
    if (!std::isfinite(loss)) throw NumericalError("fit_gbt: non-finite loss at tree " + std::to_string(t));
    if (scale != 1.0) {
      for (auto& node : tree.nodes) node.value *= scale;
    }
    margin.swap(trial);
    trace.push_back(loss);
    trees.push_back(std::move(tree));
  }
  GbtModel model(static_cast<int>(X.cols()), base, params.learning_rate, std::move(trees));
  model.loss_trace = std::move(trace);
  return model;
}

}  // namespace hatestack
