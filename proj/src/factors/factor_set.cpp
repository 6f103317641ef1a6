#include "favar/factors/factor_set.hpp"

#include <cmath>

namespace favar::factors {

std::string method_name(FactorMethod m) {
  switch (m) {
    case FactorMethod::kPca: return "pca";
    case FactorMethod::kPlainAe: return "plain_ae";
    case FactorMethod::kGsAeLinear: return "gs_ae_linear";
    case FactorMethod::kGsAeNonlinear: return "gs_ae_nonlinear";
  }
  throw Error("unknown factor method");
}

FactorMethod method_from_name(const std::string& name) {
  if (name == "pca") return FactorMethod::kPca;
  if (name == "plain_ae") return FactorMethod::kPlainAe;
  if (name == "gs_ae_linear") return FactorMethod::kGsAeLinear;
  if (name == "gs_ae_nonlinear") return FactorMethod::kGsAeNonlinear;
  throw Error("unknown factor method '" + name + "'");
}

Matrix FactorSet::joint() const {
  if (observable.rows() != latent.rows()) {
    throw ShapeMismatch("factor set: latent and observable row counts differ");
  }
  Matrix out(latent.rows(), latent.cols() + observable.cols());
  out << latent, observable;
  return out;
}

std::vector<int> standardize_factors(Matrix& latent) {
  std::vector<int> degenerate;
  const int T = static_cast<int>(latent.rows());
  for (int k = 0; k < latent.cols(); ++k) {
    const double mean = latent.col(k).mean();
    latent.col(k).array() -= mean;
    const double var = latent.col(k).squaredNorm() / T;
    if (var < 1e-12) {
      latent.col(k).setZero();
      degenerate.push_back(k);
      continue;
    }
    latent.col(k) /= std::sqrt(var);
  }
  return degenerate;
}

}  // namespace favar::factors
