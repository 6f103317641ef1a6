#pragma once

#include "favar/factors/factor_set.hpp"
#include "favar/gsae/network.hpp"

namespace favar::gsae {

// Per-epoch full-panel losses: total = reconstruction + regularization, i.e.
// the negative objective split into its two parts.
struct LossTrace {
  std::vector<double> total;
  std::vector<double> reconstruction;
  std::vector<double> regularization;
};

struct TrainResult {
  GsAeParams params;
  LossTrace trace;
};

// Mini-batch ascent: per epoch, (re)shuffle rows, walk batches (short final
// batch kept), take one Adam step per batch, then refresh the inclusion
// probabilities in closed form. Deterministic given (arch, ssl, cfg, rng).
TrainResult train(const Matrix& X, const GsAeArchitecture& arch,
                  const SslConfig& ssl, const TrainConfig& cfg, RngStream& rng);

struct InjectivityReport {
  bool activation_injective = false;
  std::vector<double> min_singular;  // per shared decoder layer
  std::vector<double> max_singular;
  std::vector<bool> layer_full_rank;
  // The stacked-identity completion of the per-variable final layer holds by
  // construction and is never materialized; recorded here for the report.
  bool final_layer_by_construction = true;

  bool pass() const;
};

// Verifies the decoder-injectivity conditions: injective activation and full
// column rank (min singular value > 1e-8 * max) of every shared decoder
// weight.
InjectivityReport check_injectivity(const GsAeParams& params);

// Encodes the full panel, standardizes factor columns, and aligns signs so
// each anchored factor correlates positively with the mean series of its
// anchor group. X columns must match the training layout.
factors::FactorSet extract_factors(const GsAeParams& params, const Matrix& X,
                                   const Matrix& Y,
                                   factors::FactorMethod method);

}  // namespace favar::gsae
