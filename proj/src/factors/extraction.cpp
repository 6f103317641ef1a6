#include "favar/factors/extraction.hpp"

#include <cmath>

namespace favar::factors {

FactorSet pca_factors(const Matrix& X, const Matrix& Y, int K) {
  if (K < 1 || K > X.cols()) {
    throw KOutOfRange("pca_factors: K must lie in [1, panel width]");
  }
  if (Y.rows() > 0 && Y.rows() != X.rows()) {
    throw ShapeMismatch("pca_factors: X and Y row counts differ");
  }
  const PcaResult r = pca(X, K);
  FactorSet fs;
  fs.method = FactorMethod::kPca;
  fs.latent = r.scores;
  fs.observable = Y;
  fs.degenerate = standardize_factors(fs.latent);
  return fs;
}

FactorSet pca_factors(const Panel& panel, int K) {
  const auto xi = panel.x_indices();
  const auto yi = panel.y_indices();
  Matrix X(panel.rows(), static_cast<int>(xi.size()));
  for (std::size_t c = 0; c < xi.size(); ++c) X.col(c) = panel.values.col(xi[c]);
  Matrix Y(panel.rows(), static_cast<int>(yi.size()));
  for (std::size_t c = 0; c < yi.size(); ++c) Y.col(c) = panel.values.col(yi[c]);
  return pca_factors(X, Y, K);
}

namespace {

double column_corr(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace

Alignment align_to_reference(const Matrix& target, const Matrix& reference) {
  if (target.rows() != reference.rows() ||
      target.cols() != reference.cols()) {
    throw ShapeMismatch("align_to_reference: factor sets must share shape");
  }
  const int K = static_cast<int>(target.cols());
  Matrix corr(K, K);
  for (int t = 0; t < K; ++t) {
    Vector tc = target.col(t).array() - target.col(t).mean();
    for (int r = 0; r < K; ++r) {
      Vector rc = reference.col(r).array() - reference.col(r).mean();
      corr(t, r) = column_corr(tc, rc);
    }
  }

  Alignment a;
  a.source.assign(K, -1);
  a.sign = Vector::Ones(K);
  std::vector<bool> t_used(K, false), r_used(K, false);
  for (int step = 0; step < K; ++step) {
    int bt = -1, br = -1;
    double best = -1.0;
    for (int t = 0; t < K; ++t) {
      if (t_used[t]) continue;
      for (int r = 0; r < K; ++r) {
        if (r_used[r]) continue;
        if (std::abs(corr(t, r)) > best) {
          best = std::abs(corr(t, r));
          bt = t;
          br = r;
        }
      }
    }
    t_used[bt] = true;
    r_used[br] = true;
    a.source[br] = bt;
    a.sign(br) = corr(bt, br) < 0.0 ? -1.0 : 1.0;
  }
  return a;
}

Matrix apply_alignment(const Matrix& target, const Alignment& a) {
  if (static_cast<int>(a.source.size()) != target.cols()) {
    throw ShapeMismatch("apply_alignment: width mismatch");
  }
  Matrix out(target.rows(), target.cols());
  for (int j = 0; j < target.cols(); ++j) {
    out.col(j) = a.sign(j) * target.col(a.source[j]);
  }
  return out;
}

Matrix slow_moving_adjust(const Matrix& fhat, const Matrix& fhat_slow,
                          const Matrix& y, std::vector<int>* degenerate) {
  const auto T = fhat.rows();
  if (fhat_slow.rows() != T || y.rows() != T) {
    throw ShapeMismatch("slow_moving_adjust: row counts differ");
  }
  Matrix R(T, fhat_slow.cols() + y.cols());
  R << fhat_slow, y;
  const Matrix B = ols(R, fhat);  // (Ks + M, K)
  const Matrix By = B.bottomRows(y.cols());
  Matrix adjusted = fhat - y * By;
  const std::vector<int> degen = standardize_factors(adjusted);
  if (degenerate) *degenerate = degen;
  return adjusted;
}

}  // namespace favar::factors
