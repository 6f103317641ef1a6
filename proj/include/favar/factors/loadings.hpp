#pragma once

#include "favar/factors/factor_set.hpp"
#include "favar/rng.hpp"

namespace favar::factors {

// Posterior draws of the observation equation x_i = w' lambda_i + e_i,
// e_i ~ N(0, sigma2_i), with w = (f, y). One matrix row per panel variable.
struct LoadingDraws {
  std::vector<Matrix> lambda;  // each N x (K+M)
  std::vector<Vector> sigma2;  // each N, strictly positive
  int count() const { return static_cast<int>(lambda.size()); }
};

// Gibbs sampler alternating, per variable, the conjugate normal draw of
// lambda_i under the N(0, 4I) prior and the Gamma(0.01, 0.01) precision
// draw. Variables are conditionally independent given (F, Y).
LoadingDraws gibbs_lambda_sigma(const FactorSet& factors, const Matrix& X,
                                int n_burn, int n_draws, RngStream& rng);

void save_loading_draws(const std::string& path, const LoadingDraws& draws);
LoadingDraws load_loading_draws(const std::string& path);

}  // namespace favar::factors
