#include "favar/factors/loadings.hpp"

#include "favar/io/binio.hpp"

namespace favar::factors {

namespace {
constexpr double kPriorPrecision = 0.25;  // lambda_i ~ N(0, 4I)
constexpr double kGammaA = 0.01;
constexpr double kGammaB = 0.01;
constexpr char kMagic[] = "FAVRLOAD";
}  // namespace

LoadingDraws gibbs_lambda_sigma(const FactorSet& factors, const Matrix& X,
                                int n_burn, int n_draws, RngStream& rng) {
  const Matrix W = factors.joint();
  if (W.rows() != X.rows()) {
    throw ShapeMismatch("gibbs_lambda_sigma: factors and panel row counts differ");
  }
  if (n_burn < 0 || n_draws < 1) {
    throw ShapeMismatch("gibbs_lambda_sigma: need n_burn >= 0, n_draws >= 1");
  }
  const int T = static_cast<int>(X.rows());
  const int N = static_cast<int>(X.cols());
  const int d = static_cast<int>(W.cols());

  const Matrix WtW = W.transpose() * W;
  const Matrix WtX = W.transpose() * X;  // column i serves variable i

  LoadingDraws out;
  out.lambda.reserve(n_draws);
  out.sigma2.reserve(n_draws);

  Matrix lambda = Matrix::Zero(N, d);
  Vector sigma2 = Vector::Ones(N);
  const Matrix prior = kPriorPrecision * Matrix::Identity(d, d);

  for (int sweep = 0; sweep < n_burn + n_draws; ++sweep) {
    for (int i = 0; i < N; ++i) {
      const Matrix post_prec = prior + WtW / sigma2(i);
      const Matrix L = cholesky(post_prec);
      // mean solves post_prec * m = WtX_i / sigma2_i
      const Vector rhs = WtX.col(i) / sigma2(i);
      const Vector mean = L.transpose().triangularView<Eigen::Upper>().solve(
          L.triangularView<Eigen::Lower>().solve(rhs));
      Vector z(d);
      for (int k = 0; k < d; ++k) z(k) = rng.normal();
      // L^{-T} z has covariance post_prec^{-1}
      const Vector noise =
          L.transpose().triangularView<Eigen::Upper>().solve(z);
      lambda.row(i) = (mean + noise).transpose();

      const Vector resid = X.col(i) - W * lambda.row(i).transpose();
      const double rate = kGammaB + 0.5 * resid.squaredNorm();
      const double prec = rng.gamma(kGammaA + 0.5 * T, 1.0 / rate);
      sigma2(i) = 1.0 / prec;
    }
    if (sweep >= n_burn) {
      out.lambda.push_back(lambda);
      out.sigma2.push_back(sigma2);
    }
  }
  return out;
}

void save_loading_draws(const std::string& path, const LoadingDraws& draws) {
  io::BinWriter w(path);
  w.str(kMagic);
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(draws.count()));
  for (int i = 0; i < draws.count(); ++i) {
    w.mat_f64(draws.lambda[i]);
    w.vec_f64(draws.sigma2[i]);
  }
}

LoadingDraws load_loading_draws(const std::string& path) {
  io::BinReader r(path);
  if (r.str() != kMagic) throw BadArtifact(path + ": not a loading artifact");
  if (r.u32() != 1) throw BadArtifact(path + ": unsupported loading version");
  const auto count = r.u32();
  LoadingDraws out;
  for (std::uint32_t i = 0; i < count; ++i) {
    out.lambda.push_back(r.mat_f64());
    out.sigma2.push_back(r.vec_f64());
    if (i > 0 && (out.lambda[i].rows() != out.lambda[0].rows() ||
                  out.lambda[i].cols() != out.lambda[0].cols())) {
      throw BadArtifact(path + ": inconsistent loading draw shapes");
    }
    if ((out.sigma2[i].array() <= 0.0).any()) {
      throw BadArtifact(path + ": non-positive variance in loading draw");
    }
  }
  return out;
}

}  // namespace favar::factors
