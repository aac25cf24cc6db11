#include <doctest.h>

#include <cmath>

#include "hatestack/error.hpp"
#include "hatestack/gbt.hpp"
#include "hatestack/logistic.hpp"
#include "hatestack/mlp.hpp"
#include "hatestack/rng.hpp"
#include "hatestack/standardizer.hpp"
#include "oracles.hpp"

using namespace hatestack;

namespace {

template <class Model>
double train_accuracy(const Model& m, const Matrix& X, const std::vector<int>& y) {
  int ok = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) ok += (m.predict_prob(row_span(X, i)) >= 0.5) == (y[i] == 1);
  return static_cast<double>(ok) / static_cast<double>(X.rows());
}

struct Blobs {
  Matrix X;
  std::vector<int> y;
};

Blobs blobs(int per_class, double spread, std::uint64_t seed) {
  Rng rng(seed);
  const double centers[3][2] = {{-4, 0}, {4, 0}, {0, 5}};
  Blobs b{Matrix(3 * per_class, 2), {}};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_class; ++i) {
      const int r = c * per_class + i;
      b.X(r, 0) = rng.normal(centers[c][0], spread);
      b.X(r, 1) = rng.normal(centers[c][1], spread);
      b.y.push_back(c);
    }
  }
  return b;
}

int argmax(const MlpModel::Probs& p) {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

TEST_CASE("logistic separates linearly separable data") {
  Rng rng(1);
  Matrix X(200, 2);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    const double margin = X(i, 0) + 0.5 * X(i, 1);
    if (std::abs(margin) < 0.2) X(i, 0) += margin > 0 ? 0.4 : -0.4;
    y[i] = X(i, 0) + 0.5 * X(i, 1) > 0;
  }
  CHECK(train_accuracy(fit_logistic(X, y), X, y) >= 0.99);
}

TEST_CASE("logistic with constant labels predicts the class rate") {
  Rng rng(2);
  Matrix X(50, 3);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
  const std::vector<int> ones(50, 1);
  const auto m = fit_logistic(X, ones, {.l2 = 0.1});
  for (int i = 0; i < 50; ++i) CHECK(m.predict_prob(row_span(X, i)) > 0.99);
  CHECK(LogisticModel(Vector::Zero(3), 0).predict_prob(row_span(X, 0)) == 0.5);
  CHECK_THROWS_AS(m.predict_prob(std::vector<double>(2)), DataError);
}

TEST_CASE("logistic gradient matches finite differences") {
  Rng rng(3);
  Matrix X(30, 4);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    y[i] = rng.bernoulli(0.4);
  }
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> theta(5);
    for (double& t : theta) t = rng.normal();
    auto f = [&](const std::vector<double>& t) {
      return logistic_objective(X, y, Eigen::Map<const Vector>(t.data(), 4), t[4], 0.01);
    };
    Vector gw;
    double gb = 0;
    logistic_objective(X, y, Eigen::Map<const Vector>(theta.data(), 4), theta[4], 0.01, &gw, &gb);
    const auto numeric = oracle::central_gradient(f, theta);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(gw(j) - numeric[j]) <= 1e-5);
    CHECK(std::abs(gb - numeric[4]) <= 1e-5);
  }
}

TEST_CASE("gbt fits xor") {
  Rng rng(4);
  Matrix X(200, 2);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    X(i, 0) = rng.uniform(-1, 1);
    X(i, 1) = rng.uniform(-1, 1);
    y[i] = (X(i, 0) > 0) != (X(i, 1) > 0);
  }
  const auto gbt = fit_gbt(X, y, {.n_trees = 50, .max_depth = 2});
  CHECK(train_accuracy(gbt, X, y) >= 0.95);
  CHECK(train_accuracy(fit_logistic(X, y), X, y) <= 0.65);
  for (std::size_t t = 1; t < gbt.loss_trace.size(); ++t) CHECK(gbt.loss_trace[t] <= gbt.loss_trace[t - 1]);
  for (const auto& tree : gbt.trees()) CHECK(tree.depth() <= 2);

  const auto again = fit_gbt(X, y, {.n_trees = 50, .max_depth = 2});
  CHECK(GbtModel::from_envelope(again.to_envelope()).predict_prob(row_span(X, 7)) == gbt.predict_prob(row_span(X, 7)));
}

TEST_CASE("gbt with no trees predicts the prior") {
  Matrix X(10, 1);
  for (int i = 0; i < 10; ++i) X(i, 0) = i;
  const std::vector<int> y{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  const auto m = fit_gbt(X, y, {.n_trees = 0});
  for (int i = 0; i < 10; ++i) CHECK(m.predict_prob(row_span(X, i)) == doctest::Approx(0.3));
}

TEST_CASE("gbt stump by hand") {
  RegressionTree stump;
  stump.nodes = {{0, 0.0, 1, 2, 0}, {-1, 0, -1, -1, -1.0}, {-1, 0, -1, -1, 2.0}};
  const GbtModel m(1, 0.5, 0.1, {stump});
  CHECK(m.predict_prob(std::vector<double>{1.0}) == doctest::Approx(1 / (1 + std::exp(-0.7))));
  CHECK(m.predict_prob(std::vector<double>{-1.0}) == doctest::Approx(1 / (1 + std::exp(-0.4))));

  // 10 rows at -1 labelled 0, 10 at +1 labelled 1: base 0, residual +-0.5,
  // hessian 0.25, leaf = 5 / (2.5 + 1).
  Matrix X(20, 1);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = i < 10 ? -1 : 1;
    y[i] = i >= 10;
  }
  const auto fitted = fit_gbt(X, y, {.n_trees = 1, .max_depth = 1, .learning_rate = 0.1, .min_leaf = 1});
  const double leaf = 5.0 / 3.5;
  CHECK(fitted.predict_prob(std::vector<double>{1.0}) == doctest::Approx(1 / (1 + std::exp(-0.1 * leaf))));
  CHECK(fitted.predict_prob(std::vector<double>{-1.0}) == doctest::Approx(1 / (1 + std::exp(0.1 * leaf))));
}

TEST_CASE("mlp on blobs") {
  const auto b = blobs(60, 0.7, 5);
  const MlpParams params{.hidden = 8, .epochs = 100, .seed = 9};
  const auto m = fit_mlp(b.X, b.y, params);
  int ok = 0;
  for (int i = 0; i < b.X.rows(); ++i) ok += argmax(m.predict(row_span(b.X, i))) == b.y[i];
  CHECK(static_cast<double>(ok) / static_cast<double>(b.X.rows()) >= 0.95);

  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> x{rng.normal(0, 10), rng.normal(0, 10)};
    const auto p = m.predict(x);
    CHECK(std::abs(p[0] + p[1] + p[2] - 1) <= 1e-9);
  }
  const auto again = fit_mlp(b.X, b.y, params);
  CHECK(again.w1() == m.w1());
  CHECK(MlpModel::from_envelope(m.to_envelope()).predict(row_span(b.X, 3)) == m.predict(row_span(b.X, 3)));
  CHECK_THROWS_AS(m.predict(std::vector<double>(3)), DataError);
}

TEST_CASE("mlp memorizes a small set") {
  const auto b = blobs(4, 2.0, 7);
  const auto m = fit_mlp(b.X, b.y, {.hidden = 16, .epochs = 2000, .learning_rate = 0.1, .l2 = 0, .batch_size = 4, .seed = 1});
  for (int i = 0; i < b.X.rows(); ++i) CHECK(argmax(m.predict(row_span(b.X, i))) == b.y[i]);
}

TEST_CASE("standardizer on its own training matrix") {
  Rng rng(8);
  Matrix X(100, 3);
  for (int i = 0; i < 100; ++i) {
    X(i, 0) = rng.normal(5, 2);
    X(i, 1) = 7;
    X(i, 2) = rng.uniform(-3, 3);
  }
  const auto s = fit_standardizer(X);
  CHECK(s.kept_columns() == std::vector<int>{0, 2});
  const Matrix Z = s.transform(X);
  for (int j = 0; j < Z.cols(); ++j) {
    const double mean = Z.col(j).mean();
    const double var = (Z.col(j).array() - mean).square().sum() / 99.0;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1) < 1e-9);
  }
  CHECK_THROWS_AS(fit_standardizer(Matrix::Constant(10, 2, 1.0)), DataError);
}
