#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "baseline.hpp"
#include "hatestack/embeddings.hpp"
#include "hatestack/error.hpp"
#include "hatestack/pls.hpp"
#include "hatestack/rng.hpp"

using namespace hatestack;

namespace {

std::string embedding_file(int dim, int records, int short_record = -1) {
  std::string s = "#dim=" + std::to_string(dim) + "\n";
  for (int r = 0; r < records; ++r) {
    s += "m" + std::to_string(r) + "\t";
    const int n = r == short_record ? dim - 1 : dim;
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + std::to_string(0.001 * (i + r));
    s += "\n";
  }
  return s;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

Matrix one_hot(const std::vector<int>& y) {
  Matrix Y = Matrix::Zero(static_cast<Eigen::Index>(y.size()), 3);
  for (std::size_t i = 0; i < y.size(); ++i) Y(static_cast<Eigen::Index>(i), y[i]) = 1;
  return Y;
}

}  // namespace

TEST_CASE("embedding file format") {
  const auto t = parse_embeddings(embedding_file(768, 3));
  CHECK(t.dim() == 768);
  CHECK(t.size() == 3);
  CHECK(t.find("m1")->size() == 768);
  try {
    parse_embeddings(embedding_file(768, 3, 1));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("m1") != std::string::npos);
  }
  CHECK(parse_embeddings("#dim=768\n").size() == 0);
  CHECK_THROWS_AS(parse_embeddings("#dim=2\na\t1 2\na\t3 4\n"), DataError);
  CHECK_THROWS_AS(parse_embeddings("#dim=2\na\t1 nan\n"), DataError);

  const auto back = parse_embeddings(format_embeddings(t));
  CHECK(back.vectors() == t.vectors());
}

TEST_CASE("hashed embedding") {
  const std::vector<std::string> a{"they", "took", "our", "jobs"};
  const std::vector<std::string> b{"they", "took", "our", "cars"};
  CHECK(hashed_embedding(a, 64, 0) == hashed_embedding(a, 64, 0));
  const auto z = hashed_embedding({}, 64, 0);
  CHECK(std::all_of(z.begin(), z.end(), [](double v) { return v == 0; }));
  CHECK(cosine(hashed_embedding(a, 64, 0), hashed_embedding(b, 64, 0)) < 1 - 1e-9);
  double norm = 0;
  for (double v : hashed_embedding(a, 128, 0)) norm += v * v;
  CHECK(norm == doctest::Approx(1.0));

  const HashedEmbeddingProvider p(32);
  CHECK(p.describe() == "hashed:32");
  CHECK(p.embed("x", a).size() == 32);
}

TEST_CASE("external provider requires every id") {
  auto table = std::make_shared<EmbeddingTable>(parse_embeddings(embedding_file(4, 2)));
  const ExternalEmbeddingProvider p(table);
  CHECK(p.embed("m0", {}).size() == 4);
  CHECK_THROWS_AS(p.embed("nope", {}), DataError);
}

TEST_CASE("pls recovers the discriminative direction") {
  Rng rng(4);
  const int n = 300, d = 6;
  Matrix X(n, d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = rng.normal();
    y[i] = X(i, 0) > 0 ? 2 : 0;
  }
  const auto fit = fit_pls(X, one_hot(y), 1);
  const auto w = fit.model.weights().col(0);
  CHECK(w(0) * w(0) > 0.9 * w.squaredNorm());
}

TEST_CASE("pls scores, transform and full-rank extraction") {
  Rng rng(5);
  Matrix X(40, 8);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 8; ++j) X(i, j) = rng.normal();
    y[i] = static_cast<int>(rng.index(3));
  }
  const auto fit = fit_pls(X, one_hot(y), 5);
  const Matrix& T = fit.train_scores;
  for (int a = 0; a < T.cols(); ++a) {
    for (int b = a + 1; b < T.cols(); ++b) {
      CHECK(std::abs(T.col(a).dot(T.col(b))) <= 1e-8 * T.col(a).norm() * T.col(b).norm());
    }
  }
  const Matrix again = fit.model.transform(X);
  CHECK((again - T).cwiseAbs().maxCoeff() < 1e-8);
  const Vector mean = fit.model.x_mean();
  CHECK(fit.model.transform(std::span<const double>(mean.data(), mean.size())).cwiseAbs().maxCoeff() < 1e-12);

  Vector probe(8);
  for (int j = 0; j < 8; ++j) probe(j) = rng.normal();
  Vector scaled = mean + 2.5 * (probe - mean);
  const Vector t1 = fit.model.transform(std::span<const double>(probe.data(), 8));
  const Vector t2 = fit.model.transform(std::span<const double>(scaled.data(), 8));
  CHECK((t2 - 2.5 * t1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(fit.model.transform(std::vector<double>(3)), DataError);

  Matrix small(5, 3);
  small << 1, 2, 0.5, -1, 0, 2, 3, 1, -1, 0, -2, 1, 2, 2, 2;
  const auto full = fit_pls(small, one_hot({0, 1, 2, 0, 1}), 3);
  CHECK(full.x_residual.norm() < 1e-6);

  const auto round = PlsModel::from_envelope(fit.model.to_envelope());
  CHECK(round.transform(X) == fit.model.transform(X));
}

TEST_CASE("pls only sees training rows") {
  Rng rng(6);
  Matrix X(60, 5);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 5; ++j) X(i, j) = rng.normal();
    y[i] = static_cast<int>(rng.index(3));
  }
  const auto fit = fit_pls(X.topRows(40), one_hot(std::vector<int>(y.begin(), y.begin() + 40)), 3);
  Matrix held = X.bottomRows(20);
  const Matrix before = fit.model.transform(held);
  held.row(0).swap(held.row(19));
  const Matrix after = fit.model.transform(held);
  CHECK(after.row(19) == before.row(0));
  CHECK(after.row(0) == before.row(19));
}

TEST_CASE("supervised reduction is at least as good as unsupervised on blobs") {
  Rng rng(7);
  const int n = 300, d = 50;
  Matrix X(n, d);
  std::vector<Severity> labels(n);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 3;
    labels[i] = severity_from_code(y[i]);
    for (int j = 0; j < d; ++j) X(i, j) = rng.normal(0, j < 2 ? 1.0 : 3.0);
    X(i, 0) += 1.5 * (y[i] - 1);
    X(i, 1) += 1.5 * (y[i] == 1 ? 1 : -0.5);
  }
  const Matrix Tpls = fit_pls(X, one_hot(y), 2).train_scores;
  const Matrix centered = X.rowwise() - X.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Matrix Tpca = centered * svd.matrixV().leftCols(2);
  auto accuracy = [&](const Matrix& T) {
    const auto clf = baseline::OneVsRest::fit(T, labels);
    int ok = 0;
    for (int i = 0; i < n; ++i) ok += clf.predict(row_span(T, i)) == labels[i];
    return static_cast<double>(ok) / n;
  };
  CHECK(accuracy(Tpls) >= accuracy(Tpca));
}
