#pragma once

#include "favar/factors/factor_set.hpp"
#include "favar/panel.hpp"

namespace favar::factors {

// First K principal-component scores of the panel's x block, standardized to
// the F'F = T*I convention. Y rides along unchanged.
FactorSet pca_factors(const Matrix& X, const Matrix& Y, int K);
FactorSet pca_factors(const Panel& panel, int K);

// Column matching between two factor sets of equal width: reference column j
// is served by sign[j] * target.col(source[j]). Built greedily on the
// absolute correlation matrix (largest entry first); signs make the matched
// correlations positive.
struct Alignment {
  std::vector<int> source;
  Vector sign;
};

Alignment align_to_reference(const Matrix& target, const Matrix& reference);
Matrix apply_alignment(const Matrix& target, const Alignment& a);

// Purges the observables' contemporaneous imprint from full-panel factors:
// regress fhat on (fhat_slow, y), subtract the y part, re-standardize.
// Columns whose variance collapses are zeroed and reported in `degenerate`.
Matrix slow_moving_adjust(const Matrix& fhat, const Matrix& fhat_slow,
                          const Matrix& y,
                          std::vector<int>* degenerate = nullptr);

}  // namespace favar::factors
