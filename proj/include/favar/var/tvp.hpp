#pragma once

#include "favar/factors/factor_set.hpp"
#include "favar/rng.hpp"
#include "favar/var/kalman.hpp"

#include <Eigen/Core>

namespace favar::var {

// Prior for the time-varying-parameter VAR with stochastic volatility.
// Coefficient initial states follow the same Minnesota layout as the
// time-invariant model; contemporaneous-relation rows and log volatilities
// start from N(0, init_cov * I). The q*_scale knobs set the inverse-Wishart
// scale of the corresponding state-innovation covariance.
struct TvpPrior {
  int P = 2;
  double xi1 = 0.7;
  double xi2 = 0.1;
  Vector sigma2_ar;
  double init_cov_h = 4.0;
  double init_cov_s = 4.0;
  double qa_scale = 1e-4;
  double qh_scale = 1e-4;
  double qs_scale = 1e-2;
  double cbar = 1e-3;  // offset inside log(u^2 + cbar)
  bool exact_volatility_mh = false;
};

TvpPrior default_tvp_prior(const Matrix& Z, int P);

// Contemporaneous-relation states are the subdiagonal entries of a unit
// lower triangular matrix, packed row-major: row r (0-based, r >= 1)
// occupies columns h_row_offset(r) .. h_row_offset(r) + r - 1.
inline int h_state_dim(int n) { return n * (n - 1) / 2; }
inline int h_row_offset(int r) { return r * (r - 1) / 2; }

// One retained sweep. Every *_path matrix has Te + 1 rows: row 0 is the
// initial state and row tau corresponds to observation tau (1-based over
// the effective sample of length Te = T - P).
struct TvpDraw {
  Matrix a_path;              // (Te+1) x n^2 P, equation-major coefficients
  Matrix h_path;              // (Te+1) x n(n-1)/2
  Matrix logs_path;           // (Te+1) x n
  Matrix Q_a;
  std::vector<Matrix> Q_h;    // one block per row r = 1..n-1
  Matrix Q_s;
  Eigen::MatrixXi indicators; // Te x n mixture components

  Matrix A_at(int tau, int n, int P) const;  // n x nP coefficient matrix
  Matrix Hinv_at(int tau, int n) const;      // unit lower triangular
  Vector s_at(int tau) const;                // exp(log volatilities)
  // Omega_tau = H S S' H' with H = Hinv^{-1}, S = diag(s_tau).
  Matrix omega_at(int tau, int n) const;
};

struct TvpDraws {
  int n = 0;
  int P = 0;
  int Te = 0;
  std::vector<TvpDraw> draws;
  int count() const { return static_cast<int>(draws.size()); }
};

// Residuals of the observation equations under a given coefficient path:
// row tau-1 is z_tau - A_tau w_tau for tau = 1..Te.
Matrix tvp_residuals(const Matrix& W, const Matrix& Zout, const Matrix& a_path);

// Coefficient-path block: FFBS over a random walk with innovation
// covariance Q_a, observation z_tau = (I (x) w_tau') a_tau + e_tau,
// e_tau ~ N(0, Omega_tau). Returns the (Te+1) x n^2 P path.
Matrix draw_coefficient_path(const Matrix& W, const Matrix& Zout,
                             const Matrix& h_path, const Matrix& logs_path,
                             const Matrix& Q_a, const Vector& prior_var_a,
                             RngStream& rng);

// Covariance-row block: for each row r >= 1 the residual of equation r is
// regressed on the negated residuals of equations 0..r-1 with
// heteroskedastic noise s_r^2, one independent FFBS per row.
Matrix draw_covariance_path(const Matrix& W, const Matrix& Zout,
                            const Matrix& a_path, const Matrix& logs_path,
                            const std::vector<Matrix>& Q_h, double init_cov,
                            RngStream& rng);

struct VolatilityDraw {
  Matrix logs_path;
  Eigen::MatrixXi indicators;
};

// Volatility block: orthogonalized residuals u = Hinv e enter through
// log(u^2 + cbar); conditional on mixture indicators the system is linear
// Gaussian and all n volatilities are sampled jointly, then the indicators
// are refreshed against the new path. With exact_mh the mixture proposal is
// accepted or rejected against the exact log chi-squared likelihood.
VolatilityDraw draw_volatility_path(const Matrix& W, const Matrix& Zout,
                                    const Matrix& a_path, const Matrix& h_path,
                                    const Matrix& logs_path, const Matrix& Q_s,
                                    const Eigen::MatrixXi& indicators,
                                    double init_cov, double cbar, bool exact_mh,
                                    RngStream& rng);

// Innovation-covariance block: inverse-Wishart with scale
// prior_scale + sum of squared path increments and dof prior_dof + Te.
Matrix draw_state_innovation_cov(const Matrix& path, const Matrix& prior_scale,
                                 double prior_dof, RngStream& rng);

// Full Gibbs sweep order: coefficients, covariance rows, volatilities
// (with indicator refresh), then the three Q blocks. Keeps every thin-th
// sweep after n_burn until n_draws are retained. Throws ChainDiverged with
// the sweep index when a filter or sampler leaves the finite range.
TvpDraws tvp_mcmc(const factors::FactorSet& factors, const TvpPrior& prior,
                  int n_burn, int n_draws, int thin, RngStream& rng);

void save_tvp_draws(const std::string& path, const TvpDraws& draws);
TvpDraws load_tvp_draws(const std::string& path);

}  // namespace favar::var
