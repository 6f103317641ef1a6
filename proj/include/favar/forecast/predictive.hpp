#pragma once

#include "favar/var/tiv.hpp"
#include "favar/var/tvp.hpp"

namespace favar::forecast {

// A draw whose simulated path leaves this band (standardized units) is
// dropped from the predictive mixture and counted.
constexpr double kExplosiveLimit = 1e6;

// h-step-ahead predictive distribution as a mixture of the per-draw terminal
// conditional Gaussians: intermediate steps are simulated with shocks, the
// final step keeps its exact conditional (mean, covariance).
struct PredictiveDraws {
  Matrix mean;              // D x n, terminal conditional means
  std::vector<Matrix> cov;  // D terminal covariances, n x n
  int discarded = 0;

  int count() const { return static_cast<int>(mean.rows()); }
  int n() const { return static_cast<int>(mean.cols()); }

  // Mixture mean, the point forecast.
  Vector point() const;

  // Log of the draw-averaged marginal density of one variable at `value`.
  double log_density(int var, double value) const;

  // Log of the draw-averaged joint density.
  double log_density_joint(const Vector& value) const;
};

// `history` holds the last P rows of the joint (factors | observables)
// series, oldest first; row P-1 is the forecast origin. Throws
// ExplosiveForecast when every draw is discarded.
PredictiveDraws simulate_predictive(const var::TivDraws& draws,
                                    const Matrix& history, int h,
                                    RngStream& rng);

// TVP version: coefficient, covariance, and log-volatility states advance as
// random walks with innovations drawn from each draw's Q matrices.
PredictiveDraws simulate_predictive(const var::TvpDraws& draws,
                                    const Matrix& history, int h,
                                    RngStream& rng);

}  // namespace favar::forecast
