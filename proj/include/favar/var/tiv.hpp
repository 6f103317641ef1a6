#pragma once

#include "favar/factors/factor_set.hpp"
#include "favar/rng.hpp"

namespace favar::var {

// Minnesota-type prior for the time-invariant VAR. sigma2_ar holds the
// per-equation AR(2) residual variances that scale the cross-variable
// shrinkage ratios.
struct TivPrior {
  double xi1 = 0.7;
  double xi2 = 0.1;
  Vector sigma2_ar;
  int P = 2;
  bool sample_xi = false;  // random-walk MH on (log xi1, log xi2)
  double mh_step = 0.2;
};

struct TivDraws {
  int n = 0;
  int P = 0;
  std::vector<Matrix> A;      // n x nP, blocks [A_1 .. A_P]
  std::vector<Matrix> Omega;  // n x n, SPD
  std::vector<double> xi1;    // filled when sample_xi
  std::vector<double> xi2;
  int count() const { return static_cast<int>(A.size()); }
};

// Prior variance of the lag-p coefficient on variable j in equation i:
// xi1/p^2 on the diagonal, (xi2/p^2) * sigma2[i]/sigma2[j] off it.
double minnesota_variance(int p, int i, int j, double xi1, double xi2,
                          const Vector& sigma2);

// Diagonal of the full prior covariance over vec'd coefficients, ordered
// equation-major and lag-major within an equation: index = i*n*P + (p-1)*n + j.
Vector minnesota_diagonal(int n, const TivPrior& prior);

// AR(2) residual variances per column; zero-variance fits (constant series)
// are clamped to 1 with a warning so the prior ratios stay finite.
TivPrior default_tiv_prior(const Matrix& Z, int P);

// Stacks z_t = (f_t, y_t) into the lagged design: W rows are
// (z_{t-1}, ..., z_{t-P}), Zout rows are z_t, for t = P..T-1.
void build_var_design(const Matrix& Z, int P, Matrix& W, Matrix& Zout);

// One draw of the coefficient matrix given Omega: N(mbar, Vbar) with
// Vbar^{-1} = diag(prior_var)^{-1} + Omega^{-1} (x) W'W. Returns A (n x nP).
Matrix draw_tiv_coefficients(const Matrix& W, const Matrix& Zout,
                             const Matrix& omega, const Vector& prior_var,
                             RngStream& rng);

// One draw of Omega given coefficients: inverse-Wishart with the residual
// scatter as scale and one degree of freedom per residual row.
Matrix draw_tiv_omega(const Matrix& W, const Matrix& Zout, const Matrix& A,
                      RngStream& rng);

// Gibbs sampler over (A, Omega) and optionally (xi1, xi2). Throws
// ChainDiverged when a sweep produces non-finite state.
TivDraws gibbs_tiv(const factors::FactorSet& factors, const TivPrior& prior,
                   int n_burn, int n_draws, RngStream& rng);

void save_tiv_draws(const std::string& path, const TivDraws& draws);
TivDraws load_tiv_draws(const std::string& path);

}  // namespace favar::var
