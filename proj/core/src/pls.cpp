#include "hatestack/pls.hpp"

#include <cmath>
#include <limits>

#include "hatestack/error.hpp"

namespace hatestack {

namespace {

std::vector<double> flatten(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

Matrix unflatten(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) throw DataError("pls envelope: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace

PlsModel::PlsModel(Matrix weights, Matrix loadings, Vector x_mean, Vector x_scale, int fitted_on)
    : weights_(std::move(weights)),
      loadings_(std::move(loadings)),
      x_mean_(std::move(x_mean)),
      x_scale_(std::move(x_scale)),
      fitted_on_(fitted_on) {
  const Matrix ptw = loadings_.transpose() * weights_;
  rotation_ = weights_ * ptw.fullPivLu().inverse();
}

Vector PlsModel::transform(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw DataError("pls transform: expected length " + std::to_string(input_dim()) + ", got " +
                    std::to_string(x.size()));
  }
  const Vector z = (as_vector(x) - x_mean_).cwiseQuotient(x_scale_);
  return rotation_.transpose() * z;
}

Matrix PlsModel::transform(const Matrix& X) const {
  if (X.cols() != input_dim()) throw DataError("pls transform: column count mismatch");
  Matrix Z = (X.rowwise() - x_mean_.transpose()).array().rowwise() / x_scale_.transpose().array();
  return Z * rotation_;
}

Envelope PlsModel::to_envelope() const {
  Envelope e;
  e.kind = "pls";
  e.params = Json{{"input_dim", input_dim()}, {"n_components", n_components()}, {"fitted_on", fitted_on_}};
  e.arrays["weights"] = flatten(weights_);
  e.arrays["loadings"] = flatten(loadings_);
  e.arrays["x_mean"] = std::vector<double>(x_mean_.begin(), x_mean_.end());
  e.arrays["x_scale"] = std::vector<double>(x_scale_.begin(), x_scale_.end());
  return e;
}

PlsModel PlsModel::from_envelope(const Envelope& e) {
  e.expect("pls", 1);
  const Eigen::Index d = e.params.at("input_dim").get<int>();
  const Eigen::Index k = e.params.at("n_components").get<int>();
  const auto& mean = e.array("x_mean");
  const auto& scale = e.array("x_scale");
  if (static_cast<Eigen::Index>(mean.size()) != d || static_cast<Eigen::Index>(scale.size()) != d) {
    throw DataError("pls envelope: size mismatch");
  }
  return PlsModel(unflatten(e.array("weights"), d, k), unflatten(e.array("loadings"), d, k),
                  Eigen::Map<const Vector>(mean.data(), d), Eigen::Map<const Vector>(scale.data(), d),
                  e.params.at("fitted_on").get<int>());
}

namespace {

constexpr int kStallIterations = 10;
constexpr double kStallUlps = 64.0;

}  // namespace

PlsFit fit_pls(const Matrix& X, const Matrix& Y, int k, const PlsOptions& options) {
  const Eigen::Index n = X.rows(), d = X.cols();
  if (Y.rows() != n) throw DataError("fit_pls: X and Y row counts differ");
  if (k < 1 || n <= k || d < k) {
    throw DataError("fit_pls: need n > k and d >= k (n=" + std::to_string(n) + ", d=" +
                    std::to_string(d) + ", k=" + std::to_string(k) + ")");
  }

  Vector mean = X.colwise().mean().transpose();
  Vector scale(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double ss = (X.col(j).array() - mean(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  Eigen::MatrixXd Xr = ((X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
  Eigen::MatrixXd Yr = Y.rowwise() - Y.colwise().mean();

  const double x_norm0 = Xr.norm();
  const double y_norm0 = Yr.norm();
  Eigen::MatrixXd W(d, k), P(d, k), T(n, k);
  int extracted = 0;
  double c_norm0 = 0;
  for (int a = 0; a < k; ++a) {
    const std::string component = "PLS component " + std::to_string(a + 1);
    const Eigen::MatrixXd C = Xr.transpose() * Yr;  // d x m
    if (Xr.norm() <= 1e-12 * std::max(1.0, x_norm0) || Yr.norm() <= 1e-12 * std::max(1.0, y_norm0) ||
        C.norm() <= 1e-12 * std::max(1.0, x_norm0 * y_norm0)) {
      if (options.allow_fewer && a > 0) break;
      throw NumericalError(component + ": no covariance left between X and Y");
    }
    if (a == 0) c_norm0 = C.norm();
    // Rounding in the inner products grows as the remaining covariance shrinks.
    const double stall_floor =
        kStallUlps * std::numeric_limits<double>::epsilon() * c_norm0 / C.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C.transpose() * C);
    Eigen::VectorXd u = Yr * eig.eigenvectors().col(eig.eigenvectors().cols() - 1);

    Eigen::VectorXd w, t, t_prev;
    bool converged = false;
    double best_change = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
      w = Xr.transpose() * u;
      const double wn = w.norm();
      if (!(wn > 0) || !std::isfinite(wn)) throw NumericalError(component + ": degenerate weight vector");
      w /= wn;
      t = Xr * w;
      const double tt = t.squaredNorm();
      if (!(tt > 0)) throw NumericalError(component + ": zero score vector");
      const Eigen::VectorXd q = Yr.transpose() * t / tt;
      const double qq = q.squaredNorm();
      if (it > 0) {
        const double change = (t - t_prev).norm() / t.norm();
        if (change <= options.tolerance) {
          converged = true;
          break;
        }
        stalled = change < best_change ? 0 : stalled + 1;
        best_change = std::min(best_change, change);
        if (change <= stall_floor && stalled >= kStallIterations) {
          converged = true;
          break;
        }
      }
      if (!(qq > 0)) {
        converged = true;  // single direction left; w is final
        break;
      }
      u = Yr * q / qq;
      t_prev = t;
    }
    if (!converged) {
      throw NumericalError(component + ": NIPALS did not converge in " +
                           std::to_string(options.max_iterations) + " iterations");
    }
    const double tt = t.squaredNorm();
    const Eigen::VectorXd p = Xr.transpose() * t / tt;
    const Eigen::VectorXd q = Yr.transpose() * t / tt;
    Xr -= t * p.transpose();
    Yr -= t * q.transpose();
    W.col(a) = w;
    P.col(a) = p;
    T.col(a) = t;
    ++extracted;
  }

  PlsFit fit;
  fit.model = PlsModel(W.leftCols(extracted), P.leftCols(extracted), mean, scale, static_cast<int>(n));
  fit.train_scores = T.leftCols(extracted);
  fit.x_residual = Xr;
  return fit;
}

}  // namespace hatestack
