#include "favar/sampling.hpp"

namespace favar {

Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng,
                  bool allow_jitter) {
  const int n = static_cast<int>(mean.size());
  if (cov.rows() != n || cov.cols() != n) {
    throw ShapeMismatch("sample_mvn: mean has " + std::to_string(n) +
                        " entries, cov is " + std::to_string(cov.rows()) + "x" +
                        std::to_string(cov.cols()));
  }
  const Matrix L = allow_jitter ? cholesky_with_jitter(cov) : cholesky(cov);
  Vector z(n);
  for (int i = 0; i < n; ++i) z(i) = rng.normal();
  return mean + L * z;
}

Matrix sample_inverse_wishart(const Matrix& scale, double dof, RngStream& rng) {
  const int n = static_cast<int>(scale.rows());
  if (scale.cols() != n) {
    throw ShapeMismatch("sample_inverse_wishart: scale must be square");
  }
  if (!(dof > n - 1)) {
    throw DofTooSmall("sample_inverse_wishart: dof " + std::to_string(dof) +
                      " must exceed n-1 = " + std::to_string(n - 1));
  }
  // X ~ Wishart(scale^-1, dof) via Bartlett, then return X^-1.
  // With scale = L L', the factor B = L^-T satisfies B B' = scale^-1, and
  // B A A' B' ~ Wishart(scale^-1, dof) for the Bartlett triangle A.
  const Matrix L = cholesky_with_jitter(scale);
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(dof - i));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  const Matrix M = L.transpose().triangularView<Eigen::Upper>().solve(A);
  const Matrix X = M * M.transpose();
  Matrix draw = X.llt().solve(Matrix::Identity(n, n));
  // symmetrize against roundoff so downstream Cholesky calls stay happy
  draw = 0.5 * (draw + draw.transpose());
  return draw;
}

}  // namespace favar
