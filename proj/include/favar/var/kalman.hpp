#pragma once

#include <functional>

#include "favar/rng.hpp"
#include "favar/sampling.hpp"

namespace favar::var {

// One observation of a linear-Gaussian state space with identity transition:
// y = Z beta_t + eps, eps ~ N(0, G).
struct KalmanObs {
  Vector y;
  Matrix Z;
  Matrix G;
};

// Supplies the observation for time t = 1..T. The state path runs 0..T with
// beta_t = beta_{t-1} + w_t, w_t ~ N(0, Q), beta_0 ~ N(prior_mean, prior_cov).
using ObsBuilder = std::function<KalmanObs(int)>;

struct SmootherMoments {
  Matrix means;               // (T+1) x d, row t = E[beta_t | y_{1:T}]
  std::vector<Matrix> covs;   // T+1 marginal covariances
};

// Exact marginal smoothing moments (Rauch-Tung-Striebel pass).
SmootherMoments kalman_smoother(const ObsBuilder& obs, int T, int state_dim,
                                const Matrix& Q, const Vector& prior_mean,
                                const Matrix& prior_cov);

// Joint draw of the full state path 0..T from its smoothing distribution:
// forward Kalman filter, then backward sampling. Throws FilterBlewUp when a
// filtered moment goes non-finite.
Matrix kalman_ffbs(const ObsBuilder& obs, int T, int state_dim,
                   const Matrix& Q, const Vector& prior_mean,
                   const Matrix& prior_cov, RngStream& rng);

}  // namespace favar::var
