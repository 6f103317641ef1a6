#include "favar/var/tiv.hpp"

#include <cmath>
#include <iostream>

#include "favar/io/binio.hpp"
#include "favar/sampling.hpp"

namespace favar::var {

double minnesota_variance(int p, int i, int j, double xi1, double xi2,
                          const Vector& sigma2) {
  if (p < 1) throw ShapeMismatch("minnesota_variance: lag must be >= 1");
  const double p2 = static_cast<double>(p) * p;
  if (i == j) return xi1 / p2;
  return (xi2 / p2) * sigma2(i) / sigma2(j);
}

Vector minnesota_diagonal(int n, const TivPrior& prior) {
  if (static_cast<int>(prior.sigma2_ar.size()) != n) {
    throw ShapeMismatch("minnesota_diagonal: sigma2_ar must have one entry per equation");
  }
  Vector v(n * n * prior.P);
  int q = 0;
  for (int i = 0; i < n; ++i)
    for (int p = 1; p <= prior.P; ++p)
      for (int j = 0; j < n; ++j)
        v(q++) = minnesota_variance(p, i, j, prior.xi1, prior.xi2,
                                    prior.sigma2_ar);
  return v;
}

TivPrior default_tiv_prior(const Matrix& Z, int P) {
  TivPrior prior;
  prior.P = P;
  prior.sigma2_ar.resize(Z.cols());
  for (int j = 0; j < Z.cols(); ++j) {
    double s2 = ar2_residual_variance(Z.col(j));
    if (s2 <= 0.0) {
      std::cerr << "warning: AR(2) residual variance of column " << j
                << " is zero, clamping the prior scale to 1\n";
      s2 = 1.0;
    }
    prior.sigma2_ar(j) = s2;
  }
  return prior;
}

void build_var_design(const Matrix& Z, int P, Matrix& W, Matrix& Zout) {
  const int T = static_cast<int>(Z.rows());
  const int n = static_cast<int>(Z.cols());
  if (P < 1) throw ShapeMismatch("build_var_design: lag order must be >= 1");
  if (T <= P) throw WindowTooShort("build_var_design: need more rows than lags");
  W.resize(T - P, n * P);
  Zout.resize(T - P, n);
  for (int t = P; t < T; ++t) {
    for (int p = 1; p <= P; ++p) {
      W.block(t - P, (p - 1) * n, 1, n) = Z.row(t - p);
    }
    Zout.row(t - P) = Z.row(t);
  }
}

Matrix draw_tiv_coefficients(const Matrix& W, const Matrix& Zout,
                             const Matrix& omega, const Vector& prior_var,
                             RngStream& rng) {
  const int n = static_cast<int>(Zout.cols());
  const int np = static_cast<int>(W.cols());
  const int dim = n * np;
  if (prior_var.size() != dim) {
    throw ShapeMismatch("draw_tiv_coefficients: prior size mismatch");
  }
  const Matrix WtW = W.transpose() * W;
  const Matrix omega_inv = omega.llt().solve(Matrix::Identity(n, n));

  Matrix prec(dim, dim);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      prec.block(a * np, b * np, np, np) = omega_inv(a, b) * WtW;
  prec.diagonal() += prior_var.cwiseInverse();
  check_finite(prec, "coefficient posterior precision");

  // rhs = vec(W' Zout Omega^{-1}), equation-major blocks
  const Matrix M = W.transpose() * Zout * omega_inv;  // np x n
  Vector rhs(dim);
  for (int a = 0; a < n; ++a) rhs.segment(a * np, np) = M.col(a);

  const Matrix L = cholesky_with_jitter(prec);
  const Vector mean = L.transpose().triangularView<Eigen::Upper>().solve(
      L.triangularView<Eigen::Lower>().solve(rhs));
  Vector z(dim);
  for (int q = 0; q < dim; ++q) z(q) = rng.normal();
  const Vector alpha =
      mean + L.transpose().triangularView<Eigen::Upper>().solve(z);

  Matrix A(n, np);
  for (int a = 0; a < n; ++a) A.row(a) = alpha.segment(a * np, np).transpose();
  return A;
}

Matrix draw_tiv_omega(const Matrix& W, const Matrix& Zout, const Matrix& A,
                      RngStream& rng) {
  const Matrix E = Zout - W * A.transpose();
  const Matrix S = E.transpose() * E;
  return sample_inverse_wishart(S, static_cast<double>(E.rows()), rng);
}

namespace {

// log N(alpha; 0, V(xi)) + log Gamma(xi; 0.01, 0.01) terms for the MH step
double log_xi_target(const Matrix& A, int n, int P, double xi1, double xi2,
                     const Vector& sigma2) {
  double lp = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int p = 1; p <= P; ++p) {
      for (int j = 0; j < n; ++j) {
        const double v = minnesota_variance(p, i, j, xi1, xi2, sigma2);
        const double a = A(i, (p - 1) * n + j);
        lp += -0.5 * (std::log(v) + a * a / v);
      }
    }
  }
  const double ga = 0.01, gb = 0.01;
  lp += (ga - 1.0) * std::log(xi1) - gb * xi1;
  lp += (ga - 1.0) * std::log(xi2) - gb * xi2;
  return lp;
}

}  // namespace

TivDraws gibbs_tiv(const factors::FactorSet& factors, const TivPrior& prior,
                   int n_burn, int n_draws, RngStream& rng) {
  const Matrix Z = factors.joint();
  const int n = static_cast<int>(Z.cols());
  const int T = static_cast<int>(Z.rows());
  if (T <= prior.P * n + 10) {
    throw WindowTooShort("gibbs_tiv: sample too short for the lag order");
  }
  if (n_burn < 0 || n_draws < 1) {
    throw ShapeMismatch("gibbs_tiv: need n_burn >= 0, n_draws >= 1");
  }
  check_finite(Z, "VAR data");

  Matrix W, Zout;
  build_var_design(Z, prior.P, W, Zout);

  TivPrior state = prior;
  Vector prior_var = minnesota_diagonal(n, state);

  TivDraws out;
  out.n = n;
  out.P = prior.P;
  out.A.reserve(n_draws);
  out.Omega.reserve(n_draws);

  Matrix omega = Matrix::Identity(n, n);
  Matrix A = Matrix::Zero(n, n * prior.P);

  for (int sweep = 0; sweep < n_burn + n_draws; ++sweep) {
    try {
      A = draw_tiv_coefficients(W, Zout, omega, prior_var, rng);
      omega = draw_tiv_omega(W, Zout, A, rng);
    } catch (const NonFiniteValue& e) {
      throw ChainDiverged("gibbs_tiv: sweep " + std::to_string(sweep) + ": " +
                          e.what());
    }
    if (!A.allFinite() || !omega.allFinite()) {
      throw ChainDiverged("gibbs_tiv: non-finite draw at sweep " +
                          std::to_string(sweep));
    }
    if (state.sample_xi) {
      const double cur =
          log_xi_target(A, n, state.P, state.xi1, state.xi2, state.sigma2_ar);
      const double prop1 = state.xi1 * std::exp(state.mh_step * rng.normal());
      const double prop2 = state.xi2 * std::exp(state.mh_step * rng.normal());
      const double prop =
          log_xi_target(A, n, state.P, prop1, prop2, state.sigma2_ar);
      // log-scale random walk: Jacobian contributes log(prop/cur)
      const double log_accept = prop - cur +
                                std::log(prop1 / state.xi1) +
                                std::log(prop2 / state.xi2);
      if (std::log(rng.uniform_pos()) < log_accept) {
        state.xi1 = prop1;
        state.xi2 = prop2;
        prior_var = minnesota_diagonal(n, state);
      }
    }
    if (sweep >= n_burn) {
      out.A.push_back(A);
      out.Omega.push_back(omega);
      if (state.sample_xi) {
        out.xi1.push_back(state.xi1);
        out.xi2.push_back(state.xi2);
      }
    }
  }
  return out;
}

namespace {
constexpr char kMagic[] = "FAVRTIVD";
}

void save_tiv_draws(const std::string& path, const TivDraws& draws) {
  io::BinWriter w(path);
  w.str(kMagic);
  w.u32(1);
  w.u32(draws.n);
  w.u32(draws.P);
  w.u32(static_cast<std::uint32_t>(draws.count()));
  w.u8(draws.xi1.empty() ? 0 : 1);
  for (int i = 0; i < draws.count(); ++i) {
    w.mat_f64(draws.A[i]);
    w.mat_f64(draws.Omega[i]);
  }
  for (double x : draws.xi1) w.f64(x);
  for (double x : draws.xi2) w.f64(x);
}

TivDraws load_tiv_draws(const std::string& path) {
  io::BinReader r(path);
  if (r.str() != kMagic) throw BadArtifact(path + ": not a TIV draw artifact");
  if (r.u32() != 1) throw BadArtifact(path + ": unsupported TIV draw version");
  TivDraws out;
  out.n = static_cast<int>(r.u32());
  out.P = static_cast<int>(r.u32());
  const auto count = r.u32();
  const bool has_xi = r.u8() != 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    Matrix A = r.mat_f64();
    Matrix omega = r.mat_f64();
    if (A.rows() != out.n || A.cols() != out.n * out.P ||
        omega.rows() != out.n || omega.cols() != out.n) {
      throw BadArtifact(path + ": draw shape mismatch");
    }
    out.A.push_back(std::move(A));
    out.Omega.push_back(std::move(omega));
  }
  if (has_xi) {
    for (std::uint32_t i = 0; i < count; ++i) out.xi1.push_back(r.f64());
    for (std::uint32_t i = 0; i < count; ++i) out.xi2.push_back(r.f64());
  }
  return out;
}

}  // namespace favar::var
