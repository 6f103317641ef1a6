#pragma once

#include "favar/panel.hpp"
#include "favar/rng.hpp"

namespace favar {

enum class DecoderKind { kLinear, kMonotoneNonlinear };

struct SyntheticConfig {
  int T = 400;
  int N = 36;  // panel_x width; observables come on top
  int C = 6;
  int K = 3;
  double noise_std = 0.1;
  DecoderKind decoder_kind = DecoderKind::kMonotoneNonlinear;
  double var1_radius = 0.8;  // spectral radius of the factor VAR(1)
  int n_observables = 0;     // extra observable_y columns driven by the factors
};

struct SyntheticTruth {
  Matrix true_factors;  // T x K
  Matrix true_B;        // C x K; each of the first K rows has one nonzero
  double noise_std = 0.0;
  DecoderKind decoder_kind = DecoderKind::kLinear;
};

// Simulates a grouped factor panel: stable VAR(1) factors, per-variable
// decoders applied to the group-masked factor vector, optional observable
// columns, then standardization. Group c covers a contiguous block of
// columns; groups 0..K-1 are anchors whose B rows have a single nonzero.
std::pair<Panel, SyntheticTruth> generate_synthetic(const SyntheticConfig& cfg,
                                                    RngStream& rng);

}  // namespace favar
