#pragma once

#include "favar/gsae/model.hpp"

namespace favar::gsae {

// First/second moment accumulators, one slot per trainable tensor in the
// fixed enumeration order (encoder, shared decoder, heads, B).
struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  long step = 0;

  static AdamState zeros_like(const GsAeArchitecture& arch);
};

// One bias-corrected Adam update ascending the objective: params move along
// +lr * mhat / (sqrt(vhat) + eps).
void adam_step(AdamState& state, GsAeParams& params, const GsAeGrads& grads,
               const AdamConfig& cfg);

}  // namespace favar::gsae
