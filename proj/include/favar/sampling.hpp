#pragma once

#include "favar/linalg.hpp"
#include "favar/rng.hpp"

namespace favar {

// Draw from N(mean, cov). Samplers tolerate marginally non-PD covariances via
// the escalating jitter policy; pass allow_jitter=false to make a singular
// covariance a hard NotPositiveDefinite error instead.
Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng,
                  bool allow_jitter = true);

// Draw from the inverse-Wishart with scale matrix `scale` and `dof` degrees
// of freedom (density convention where the mean is scale / (dof - n - 1)).
// Requires dof > n - 1; throws DofTooSmall otherwise.
Matrix sample_inverse_wishart(const Matrix& scale, double dof, RngStream& rng);

}  // namespace favar
