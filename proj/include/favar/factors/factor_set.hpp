#pragma once

#include <string>
#include <vector>

#include "favar/linalg.hpp"

namespace favar::factors {

enum class FactorMethod { kPca, kPlainAe, kGsAeLinear, kGsAeNonlinear };

std::string method_name(FactorMethod m);
FactorMethod method_from_name(const std::string& name);

// Latent factors plus the observable block that joins them in the VAR.
// Columns of `latent` are standardized (PCA keeps the F'F = T*I convention,
// which is the same normalization); zero-variance factors are left at zero
// and listed in `degenerate`.
struct FactorSet {
  Matrix latent;      // T x K
  Matrix observable;  // T x M
  FactorMethod method = FactorMethod::kPca;
  std::vector<std::string> anchor_names;  // optional, K entries when present
  std::vector<int> degenerate;            // indices of degenerate factors

  int T() const { return static_cast<int>(latent.rows()); }
  int K() const { return static_cast<int>(latent.cols()); }
  int M() const { return static_cast<int>(observable.cols()); }

  // (latent | observable), the VAR state ordering: factors first, then y.
  Matrix joint() const;
};

// Standardizes factor columns in place (population convention) and returns
// the indices whose variance was too small to scale.
std::vector<int> standardize_factors(Matrix& latent);

}  // namespace favar::factors
