#include "favar/var/tvp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "favar/io/binio.hpp"
#include "favar/sampling.hpp"
#include "favar/var/ksc.hpp"
#include "favar/var/tiv.hpp"

namespace favar::var {

namespace {

Matrix hinv_from_row(const Vector& h, int n) {
  Matrix hinv = Matrix::Identity(n, n);
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < r; ++c) hinv(r, c) = h(h_row_offset(r) + c);
  return hinv;
}

Matrix omega_from_rows(const Vector& h, const Vector& logs, int n) {
  const Matrix hinv = hinv_from_row(h, n);
  Matrix H = hinv.triangularView<Eigen::UnitLower>().solve(
      Matrix::Identity(n, n));
  const Vector s2 = (2.0 * logs).array().exp();
  Matrix omega = H * s2.asDiagonal() * H.transpose();
  return 0.5 * (omega + omega.transpose());
}

void check_path_shape(const Matrix& path, int rows, int cols,
                      const char* what) {
  if (path.rows() != rows || path.cols() != cols) {
    throw ShapeMismatch(std::string(what) + ": state path shape mismatch");
  }
}

}  // namespace

TvpPrior default_tvp_prior(const Matrix& Z, int P) {
  const TivPrior base = default_tiv_prior(Z, P);
  TvpPrior prior;
  prior.P = P;
  prior.sigma2_ar = base.sigma2_ar;
  return prior;
}

Matrix TvpDraw::A_at(int tau, int n, int P) const {
  if (tau < 0 || tau >= a_path.rows()) {
    throw TimeOutOfRange("TvpDraw::A_at: tau outside the stored path");
  }
  const int np = n * P;
  Matrix A(n, np);
  for (int i = 0; i < n; ++i) A.row(i) = a_path.row(tau).segment(i * np, np);
  return A;
}

Matrix TvpDraw::Hinv_at(int tau, int n) const {
  if (tau < 0 || tau >= h_path.rows()) {
    throw TimeOutOfRange("TvpDraw::Hinv_at: tau outside the stored path");
  }
  return hinv_from_row(h_path.row(tau), n);
}

Vector TvpDraw::s_at(int tau) const {
  if (tau < 0 || tau >= logs_path.rows()) {
    throw TimeOutOfRange("TvpDraw::s_at: tau outside the stored path");
  }
  return logs_path.row(tau).array().exp();
}

Matrix TvpDraw::omega_at(int tau, int n) const {
  if (tau < 0 || tau >= h_path.rows() || tau >= logs_path.rows()) {
    throw TimeOutOfRange("TvpDraw::omega_at: tau outside the stored path");
  }
  return omega_from_rows(h_path.row(tau), logs_path.row(tau), n);
}

Matrix tvp_residuals(const Matrix& W, const Matrix& Zout,
                     const Matrix& a_path) {
  const int Te = static_cast<int>(W.rows());
  const int n = static_cast<int>(Zout.cols());
  const int np = static_cast<int>(W.cols());
  if (Zout.rows() != Te) throw ShapeMismatch("tvp_residuals: design mismatch");
  check_path_shape(a_path, Te + 1, n * np, "tvp_residuals");
  Matrix resid(Te, n);
  for (int t = 1; t <= Te; ++t) {
    for (int i = 0; i < n; ++i) {
      resid(t - 1, i) =
          Zout(t - 1, i) - a_path.row(t).segment(i * np, np).dot(W.row(t - 1));
    }
  }
  return resid;
}

Matrix draw_coefficient_path(const Matrix& W, const Matrix& Zout,
                             const Matrix& h_path, const Matrix& logs_path,
                             const Matrix& Q_a, const Vector& prior_var_a,
                             RngStream& rng) {
  const int Te = static_cast<int>(W.rows());
  const int n = static_cast<int>(Zout.cols());
  const int np = static_cast<int>(W.cols());
  const int da = n * np;
  check_path_shape(h_path, Te + 1, h_state_dim(n), "draw_coefficient_path");
  check_path_shape(logs_path, Te + 1, n, "draw_coefficient_path");
  if (Q_a.rows() != da || Q_a.cols() != da ||
      static_cast<int>(prior_var_a.size()) != da) {
    throw ShapeMismatch("draw_coefficient_path: prior dimension mismatch");
  }

  std::vector<Matrix> omegas;
  omegas.reserve(Te);
  for (int t = 1; t <= Te; ++t) {
    omegas.push_back(omega_from_rows(h_path.row(t), logs_path.row(t), n));
  }

  ObsBuilder obs = [&](int t) {
    KalmanObs o;
    o.y = Zout.row(t - 1).transpose();
    o.Z = Matrix::Zero(n, da);
    for (int i = 0; i < n; ++i) o.Z.block(i, i * np, 1, np) = W.row(t - 1);
    o.G = omegas[t - 1];
    return o;
  };
  return kalman_ffbs(obs, Te, da, Q_a, Vector::Zero(da),
                     Matrix(prior_var_a.asDiagonal()), rng);
}

Matrix draw_covariance_path(const Matrix& W, const Matrix& Zout,
                            const Matrix& a_path, const Matrix& logs_path,
                            const std::vector<Matrix>& Q_h, double init_cov,
                            RngStream& rng) {
  const int Te = static_cast<int>(W.rows());
  const int n = static_cast<int>(Zout.cols());
  check_path_shape(logs_path, Te + 1, n, "draw_covariance_path");
  if (static_cast<int>(Q_h.size()) != n - 1) {
    throw ShapeMismatch("draw_covariance_path: need one Q block per row");
  }
  const Matrix resid = tvp_residuals(W, Zout, a_path);

  Matrix h_path = Matrix::Zero(Te + 1, h_state_dim(n));
  for (int r = 1; r < n; ++r) {
    if (Q_h[r - 1].rows() != r || Q_h[r - 1].cols() != r) {
      throw ShapeMismatch("draw_covariance_path: Q block dimension mismatch");
    }
    ObsBuilder obs = [&](int t) {
      KalmanObs o;
      o.y = Vector::Constant(1, resid(t - 1, r));
      o.Z = -resid.row(t - 1).head(r);
      o.G = Matrix::Constant(1, 1, std::exp(2.0 * logs_path(t, r)));
      return o;
    };
    const Matrix row_path =
        kalman_ffbs(obs, Te, r, Q_h[r - 1], Vector::Zero(r),
                    init_cov * Matrix::Identity(r, r), rng);
    h_path.middleCols(h_row_offset(r), r) = row_path;
  }
  return h_path;
}

VolatilityDraw draw_volatility_path(const Matrix& W, const Matrix& Zout,
                                    const Matrix& a_path, const Matrix& h_path,
                                    const Matrix& logs_path, const Matrix& Q_s,
                                    const Eigen::MatrixXi& indicators,
                                    double init_cov, double cbar, bool exact_mh,
                                    RngStream& rng) {
  const int Te = static_cast<int>(W.rows());
  const int n = static_cast<int>(Zout.cols());
  check_path_shape(h_path, Te + 1, h_state_dim(n), "draw_volatility_path");
  check_path_shape(logs_path, Te + 1, n, "draw_volatility_path");
  if (indicators.rows() != Te || indicators.cols() != n) {
    throw ShapeMismatch("draw_volatility_path: indicator shape mismatch");
  }
  const Matrix resid = tvp_residuals(W, Zout, a_path);

  Matrix ystar(Te, n);
  for (int t = 1; t <= Te; ++t) {
    const Vector u = hinv_from_row(h_path.row(t), n) * resid.row(t - 1).transpose();
    ystar.row(t - 1) = (u.array().square() + cbar).log();
  }

  ObsBuilder obs = [&](int t) {
    KalmanObs o;
    o.y.resize(n);
    o.Z = 2.0 * Matrix::Identity(n, n);
    o.G = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) {
      const int j = indicators(t - 1, m);
      o.y(m) = ystar(t - 1, m) - ksc_mean(j);
      o.G(m, m) = kKscMixture[j].v2;
    }
    return o;
  };
  Matrix proposal = kalman_ffbs(obs, Te, n, Q_s, Vector::Zero(n),
                                init_cov * Matrix::Identity(n, n), rng);

  VolatilityDraw out;
  out.logs_path = std::move(proposal);
  if (exact_mh) {
    // The proposal comes from the mixture-conditional posterior; correcting
    // it against the exact log chi-squared likelihood leaves only the two
    // likelihood ratios because the state prior cancels.
    const auto exact_ll = [&](const Matrix& path) {
      double ll = 0.0;
      for (int t = 1; t <= Te; ++t)
        for (int m = 0; m < n; ++m) {
          const double w = ystar(t - 1, m) - 2.0 * path(t, m);
          ll += 0.5 * w - 0.5 * std::exp(w);
        }
      return ll;
    };
    const auto mixture_ll = [&](const Matrix& path) {
      double ll = 0.0;
      for (int t = 1; t <= Te; ++t)
        for (int m = 0; m < n; ++m) {
          const int j = indicators(t - 1, m);
          const double v2 = kKscMixture[j].v2;
          const double dev = ystar(t - 1, m) - 2.0 * path(t, m) - ksc_mean(j);
          ll += -0.5 * std::log(v2) - 0.5 * dev * dev / v2;
        }
      return ll;
    };
    const double log_accept =
        (exact_ll(out.logs_path) - mixture_ll(out.logs_path)) -
        (exact_ll(logs_path) - mixture_ll(logs_path));
    if (!(std::log(rng.uniform_pos()) < log_accept)) {
      out.logs_path = logs_path;
    }
  }

  // Indicators are refreshed against whichever path survived above.
  out.indicators.resize(Te, n);
  std::vector<double> wts(kKscMixture.size());
  for (int t = 1; t <= Te; ++t) {
    for (int m = 0; m < n; ++m) {
      double max_lw = -std::numeric_limits<double>::infinity();
      std::array<double, 7> lw{};
      for (std::size_t j = 0; j < kKscMixture.size(); ++j) {
        const double v2 = kKscMixture[j].v2;
        const double dev = ystar(t - 1, m) - 2.0 * out.logs_path(t, m) -
                           ksc_mean(static_cast<int>(j));
        lw[j] = std::log(kKscMixture[j].q) - 0.5 * std::log(v2) -
                0.5 * dev * dev / v2;
        max_lw = std::max(max_lw, lw[j]);
      }
      for (std::size_t j = 0; j < kKscMixture.size(); ++j)
        wts[j] = std::exp(lw[j] - max_lw);
      out.indicators(t - 1, m) = rng.categorical(wts);
    }
  }
  return out;
}

Matrix draw_state_innovation_cov(const Matrix& path, const Matrix& prior_scale,
                                 double prior_dof, RngStream& rng) {
  const int d = static_cast<int>(path.cols());
  const int Te = static_cast<int>(path.rows()) - 1;
  if (Te < 1) throw ShapeMismatch("draw_state_innovation_cov: path too short");
  if (prior_scale.rows() != d || prior_scale.cols() != d) {
    throw ShapeMismatch("draw_state_innovation_cov: scale dimension mismatch");
  }
  Matrix S = prior_scale;
  for (int t = 1; t <= Te; ++t) {
    const Vector delta = (path.row(t) - path.row(t - 1)).transpose();
    S += delta * delta.transpose();
  }
  S = 0.5 * (S + S.transpose());
  return sample_inverse_wishart(S, prior_dof + Te, rng);
}

TvpDraws tvp_mcmc(const factors::FactorSet& factors, const TvpPrior& prior,
                  int n_burn, int n_draws, int thin, RngStream& rng) {
  const Matrix Z = factors.joint();
  const int n = static_cast<int>(Z.cols());
  const int T = static_cast<int>(Z.rows());
  if (T <= prior.P * n + 10) {
    throw WindowTooShort("tvp_mcmc: sample too short for the lag order");
  }
  if (n_burn < 0 || n_draws < 1 || thin < 1) {
    throw ShapeMismatch("tvp_mcmc: need n_burn >= 0, n_draws >= 1, thin >= 1");
  }
  if (static_cast<int>(prior.sigma2_ar.size()) != n) {
    throw ShapeMismatch("tvp_mcmc: sigma2_ar must have one entry per series");
  }
  check_finite(Z, "VAR data");

  Matrix W, Zout;
  build_var_design(Z, prior.P, W, Zout);
  const int Te = static_cast<int>(W.rows());
  const int da = n * n * prior.P;
  const int dh = h_state_dim(n);

  TivPrior minnesota;
  minnesota.xi1 = prior.xi1;
  minnesota.xi2 = prior.xi2;
  minnesota.sigma2_ar = prior.sigma2_ar;
  minnesota.P = prior.P;
  const Vector prior_var_a = minnesota_diagonal(n, minnesota);

  // Inverse-Wishart hyperparameters: dof = block dimension + 1 so the prior
  // stays proper at every block size.
  const Matrix scale_a =
      prior.qa_scale * (da + 1) * Matrix(prior_var_a.asDiagonal());
  const double dof_a = da + 1;
  std::vector<Matrix> scale_h;
  for (int r = 1; r < n; ++r) {
    scale_h.push_back(prior.qh_scale * (r + 1) * prior.init_cov_h *
                      Matrix::Identity(r, r));
  }
  const Matrix scale_s =
      prior.qs_scale * (n + 1) * prior.init_cov_s * Matrix::Identity(n, n);
  const double dof_s = n + 1;

  Matrix a_path = Matrix::Zero(Te + 1, da);
  Matrix h_path = Matrix::Zero(Te + 1, dh);
  Matrix logs_path = Matrix::Zero(Te + 1, n);
  Matrix Q_a = prior.qa_scale * Matrix(prior_var_a.asDiagonal());
  std::vector<Matrix> Q_h;
  for (int r = 1; r < n; ++r) {
    Q_h.push_back(prior.qh_scale * prior.init_cov_h * Matrix::Identity(r, r));
  }
  Matrix Q_s = prior.qs_scale * prior.init_cov_s * Matrix::Identity(n, n);

  std::vector<double> prior_w(kKscMixture.size());
  for (std::size_t j = 0; j < kKscMixture.size(); ++j)
    prior_w[j] = kKscMixture[j].q;
  Eigen::MatrixXi indicators(Te, n);
  for (int t = 0; t < Te; ++t)
    for (int m = 0; m < n; ++m) indicators(t, m) = rng.categorical(prior_w);

  TvpDraws out;
  out.n = n;
  out.P = prior.P;
  out.Te = Te;
  out.draws.reserve(n_draws);

  const int total = n_burn + n_draws * thin;
  for (int sweep = 0; sweep < total; ++sweep) {
    try {
      a_path = draw_coefficient_path(W, Zout, h_path, logs_path, Q_a,
                                     prior_var_a, rng);
      h_path = draw_covariance_path(W, Zout, a_path, logs_path, Q_h,
                                    prior.init_cov_h, rng);
      VolatilityDraw vol = draw_volatility_path(
          W, Zout, a_path, h_path, logs_path, Q_s, indicators,
          prior.init_cov_s, prior.cbar, prior.exact_volatility_mh, rng);
      logs_path = std::move(vol.logs_path);
      indicators = std::move(vol.indicators);
      Q_a = draw_state_innovation_cov(a_path, scale_a, dof_a, rng);
      for (int r = 1; r < n; ++r) {
        Q_h[r - 1] = draw_state_innovation_cov(
            h_path.middleCols(h_row_offset(r), r), scale_h[r - 1],
            static_cast<double>(r + 1), rng);
      }
      Q_s = draw_state_innovation_cov(logs_path, scale_s, dof_s, rng);
    } catch (const FilterBlewUp& e) {
      throw ChainDiverged("tvp_mcmc: sweep " + std::to_string(sweep) + ": " +
                          e.what());
    } catch (const NonFiniteValue& e) {
      throw ChainDiverged("tvp_mcmc: sweep " + std::to_string(sweep) + ": " +
                          e.what());
    }
    if (!a_path.allFinite() || !h_path.allFinite() || !logs_path.allFinite() ||
        !Q_a.allFinite() || !Q_s.allFinite()) {
      throw ChainDiverged("tvp_mcmc: non-finite draw at sweep " +
                          std::to_string(sweep));
    }
    if (sweep >= n_burn && (sweep - n_burn) % thin == 0) {
      TvpDraw d;
      d.a_path = a_path;
      d.h_path = h_path;
      d.logs_path = logs_path;
      d.Q_a = Q_a;
      d.Q_h = Q_h;
      d.Q_s = Q_s;
      d.indicators = indicators;
      out.draws.push_back(std::move(d));
    }
  }
  return out;
}

namespace {
constexpr char kMagic[] = "FAVRTVPD";
}

void save_tvp_draws(const std::string& path, const TvpDraws& draws) {
  io::BinWriter w(path);
  w.str(kMagic);
  w.u32(1);
  w.u32(draws.n);
  w.u32(draws.P);
  w.u32(draws.Te);
  w.u32(static_cast<std::uint32_t>(draws.count()));
  for (const TvpDraw& d : draws.draws) {
    w.mat_f64(d.a_path);
    w.mat_f64(d.h_path);
    w.mat_f64(d.logs_path);
    w.mat_f64(d.Q_a);
    for (const Matrix& q : d.Q_h) w.mat_f64(q);
    w.mat_f64(d.Q_s);
    std::vector<int> ind(d.indicators.size());
    for (int t = 0; t < d.indicators.rows(); ++t)
      for (int m = 0; m < d.indicators.cols(); ++m)
        ind[static_cast<std::size_t>(t) * d.indicators.cols() + m] =
            d.indicators(t, m);
    w.vec_i32(ind);
  }
}

TvpDraws load_tvp_draws(const std::string& path) {
  io::BinReader r(path);
  if (r.str() != kMagic) throw BadArtifact(path + ": not a TVP draw artifact");
  if (r.u32() != 1) throw BadArtifact(path + ": unsupported TVP draw version");
  TvpDraws out;
  out.n = static_cast<int>(r.u32());
  out.P = static_cast<int>(r.u32());
  out.Te = static_cast<int>(r.u32());
  const auto count = r.u32();
  const int da = out.n * out.n * out.P;
  const int dh = h_state_dim(out.n);
  for (std::uint32_t i = 0; i < count; ++i) {
    TvpDraw d;
    d.a_path = r.mat_f64();
    d.h_path = r.mat_f64();
    d.logs_path = r.mat_f64();
    d.Q_a = r.mat_f64();
    for (int row = 1; row < out.n; ++row) d.Q_h.push_back(r.mat_f64());
    d.Q_s = r.mat_f64();
    const std::vector<int> ind = r.vec_i32();
    if (d.a_path.rows() != out.Te + 1 || d.a_path.cols() != da ||
        d.h_path.rows() != out.Te + 1 || d.h_path.cols() != dh ||
        d.logs_path.rows() != out.Te + 1 || d.logs_path.cols() != out.n ||
        d.Q_a.rows() != da || d.Q_s.rows() != out.n ||
        static_cast<int>(ind.size()) != out.Te * out.n) {
      throw BadArtifact(path + ": draw shape mismatch");
    }
    d.indicators.resize(out.Te, out.n);
    for (int t = 0; t < out.Te; ++t)
      for (int m = 0; m < out.n; ++m) {
        const int j = ind[static_cast<std::size_t>(t) * out.n + m];
        if (j < 0 || j >= static_cast<int>(kKscMixture.size())) {
          throw BadArtifact(path + ": mixture indicator out of range");
        }
        d.indicators(t, m) = j;
      }
    out.draws.push_back(std::move(d));
  }
  return out;
}

}  // namespace favar::var
