#include "favar/linalg.hpp"

#include <cmath>
#include <iostream>

namespace favar {

void check_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw NonFiniteValue(what + " contains NaN or Inf");
  }
}

void check_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) {
    throw NonFiniteValue(what + " contains NaN or Inf");
  }
}

Matrix cholesky(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ShapeMismatch("cholesky: matrix is " + std::to_string(m.rows()) +
                        "x" + std::to_string(m.cols()));
  }
  check_finite(m, "cholesky input");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw ShapeMismatch("cholesky: matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  }
  return llt.matrixL();
}

Matrix cholesky_with_jitter(const Matrix& m, double rel, int max_escalations) {
  try {
    return cholesky(m);
  } catch (const NotPositiveDefinite&) {
  }
  const int n = static_cast<int>(m.rows());
  const double base = m.trace() / n;
  // trace can be ~0 for a near-zero matrix; fall back to an absolute floor
  const double unit = (std::abs(base) > 0) ? std::abs(base) : 1.0;
  double r = rel;
  for (int k = 0; k < max_escalations; ++k, r *= 10.0) {
    Matrix jittered = m + (r * unit) * Matrix::Identity(n, n);
    Eigen::LLT<Matrix> llt(jittered);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  throw NotPositiveDefinite(
      "cholesky_with_jitter: still not positive definite after " +
      std::to_string(max_escalations) + " jitter escalations");
}

Matrix ols(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows()) {
    throw ShapeMismatch("ols: X has " + std::to_string(X.rows()) +
                        " rows, Y has " + std::to_string(Y.rows()));
  }
  if (X.rows() < X.cols()) {
    throw RankDeficient("ols: fewer rows than regressors");
  }
  check_finite(X, "ols X");
  check_finite(Y, "ols Y");
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0.0 || smax / smin >= 1e6) {
    throw RankDeficient("ols: regressor condition number too large");
  }
  return svd.solve(Y);
}

PcaResult pca(const Matrix& X, int K) {
  const int T = static_cast<int>(X.rows());
  const int N = static_cast<int>(X.cols());
  if (K < 1 || K > std::min(T, N)) {
    throw KOutOfRange("pca: K=" + std::to_string(K) + " outside [1, min(" +
                      std::to_string(T) + "," + std::to_string(N) + ")]");
  }
  check_finite(X, "pca input");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  PcaResult out;
  out.loadings = svd.matrixV().leftCols(K);
  out.explained_variance =
      svd.singularValues().head(K).array().square() / static_cast<double>(T);
  // sign convention: largest-magnitude loading entry positive per component
  for (int k = 0; k < K; ++k) {
    int imax = 0;
    out.loadings.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.loadings(imax, k) < 0) {
      out.loadings.col(k) = -out.loadings.col(k);
    }
  }
  out.scores = X * out.loadings;
  return out;
}

double ar2_residual_variance(const Vector& series) {
  const int T = static_cast<int>(series.size());
  if (T < 10) {
    throw SeriesTooShort("ar2_residual_variance: need at least 10 points, got " +
                         std::to_string(T));
  }
  check_finite(series, "ar2 series");
  const int rows = T - 2;
  Matrix X(rows, 3);
  Vector y(rows);
  for (int t = 2; t < T; ++t) {
    X(t - 2, 0) = 1.0;
    X(t - 2, 1) = series(t - 1);
    X(t - 2, 2) = series(t - 2);
    y(t - 2) = series(t);
  }
  Matrix beta;
  try {
    beta = ols(X, y);
  } catch (const RankDeficient&) {
    std::cerr << "warning: ar2_residual_variance on a (near-)constant series, "
                 "returning 0\n";
    return 0.0;
  }
  const Vector resid = y - X * beta;
  return resid.squaredNorm() / static_cast<double>(rows - 3);
}

}  // namespace favar
