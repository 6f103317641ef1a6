#pragma once

#include <Eigen/Dense>
#include <string>

#include "favar/errors.hpp"

namespace favar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws NonFiniteValue if any entry is NaN or +-Inf. `what` names the
// offending object in the message.
void check_finite(const Matrix& m, const std::string& what);
void check_finite(const Vector& v, const std::string& what);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Rejects asymmetric input (tolerance 1e-10 relative to the largest entry)
// and throws NotPositiveDefinite when the factorization breaks down.
Matrix cholesky(const Matrix& m);

// Cholesky with the escalating-jitter policy used by the samplers: on
// failure, add rel * trace/n to the diagonal and retry, escalating the
// relative jitter tenfold up to `max_escalations` times before giving up.
// Plain `cholesky` (no jitter) is what user-facing decompositions use.
Matrix cholesky_with_jitter(const Matrix& m, double rel = 1e-10,
                            int max_escalations = 3);

// Least-squares coefficients for Y = X B + E, returned as (cols(X), cols(Y)).
// Throws RankDeficient when cond(X) >= 1e6 (i.e. cond(X'X) >= 1e12).
Matrix ols(const Matrix& X, const Matrix& Y);

struct PcaResult {
  Matrix scores;              // (T, K) = X * loadings
  Matrix loadings;            // (N, K), orthonormal columns
  Vector explained_variance;  // K, descending
};

// Principal components of a (T, N) panel via SVD. Columns of X are expected
// to be centered already (the panel pipeline standardizes first). Sign
// convention: the largest-magnitude loading in each column is positive.
// explained_variance uses the population convention s_k^2 / T.
PcaResult pca(const Matrix& X, int K);

// Residual variance of an AR(2) fit with intercept, denominator
// (usable rows - 3). A constant series (rank-deficient regressors) returns
// 0.0 after warning on stderr; callers building prior scales rely on that.
double ar2_residual_variance(const Vector& series);

}  // namespace favar
