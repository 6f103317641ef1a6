#pragma once

#include <vector>

#include "favar/linalg.hpp"
#include "favar/rng.hpp"

namespace favar::gsae {

enum class Activation { kTanh, kLeakyRelu };

// Layer sizes for an encoder that walks from N down to K in L evenly spaced
// steps: dim_l = floor(N - l*(N-K)/L). With (165, 5, 3) this gives (111, 58, 5).
std::vector<int> evenly_spaced_dims(int N, int K, int L);

struct GsAeArchitecture {
  int N = 0;  // panel width
  int K = 0;  // factor count
  int C = 1;  // group count
  int L = 1;  // depth (encoder layers; decoder has L-1 shared + per-variable head)
  std::vector<int> encoder_dims;         // size L, last entry K
  std::vector<int> shared_decoder_dims;  // size L-1, increasing back toward N
  Activation activation = Activation::kLeakyRelu;
  double leaky_a = 1e-16;
  std::vector<int> group_of;  // size N, group index per variable in [0, C)
  int anchor_count = 0;       // leading groups pinned to factors one-to-one

  int head_input_dim() const {
    return shared_decoder_dims.empty() ? K : shared_decoder_dims.back();
  }
  void validate() const;

  // Mirror-shaped architecture for a panel of width N: encoder evenly spaced
  // N->K, shared decoder the reverse of the encoder's hidden dims.
  static GsAeArchitecture mirrored(int N, int K, int L, Activation act,
                                   double leaky_a, std::vector<int> group_of,
                                   int C, int anchor_count);
};

struct SslConfig {
  double lambda0 = 1000.0;  // spike rate
  double lambda1 = 1.0;     // slab rate
  bool enabled = true;      // false = plain autoencoder baseline (B frozen at 1)
  bool hard_zero_anchors = false;
  void validate() const;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 24;
  AdamConfig adam;
  bool shuffle = true;
};

// All trainable state plus the inclusion probabilities P (not trained by
// gradient; refreshed in closed form after each step).
struct GsAeParams {
  GsAeArchitecture arch;
  std::vector<Matrix> enc_W;  // (dims[l], prev_dim)
  std::vector<Vector> enc_b;
  std::vector<Matrix> dec_W;  // shared decoder layers
  std::vector<Vector> dec_b;
  Matrix head_W;  // (N, head_input_dim); row i is variable i's final weights
  Vector head_b;  // N
  Matrix B;       // (C, K) group-sparsity coefficients
  Matrix P;       // (C, K) inclusion probabilities in [0,1]
  Matrix anchor_mask;  // (C, K): 1 where the cell's indicator is pinned

  bool is_anchor_row(int c) const { return c < arch.anchor_count; }
};

// Gradient record with the trainable subset of GsAeParams' shape.
struct GsAeGrads {
  std::vector<Matrix> enc_W;
  std::vector<Vector> enc_b;
  std::vector<Matrix> dec_W;
  std::vector<Vector> dec_b;
  Matrix head_W;
  Vector head_b;
  Matrix B;
};

GsAeGrads zero_grads(const GsAeArchitecture& arch);

// Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases; B at 0.5 on anchor
// diagonals and 0.1 elsewhere (exact 0 on masked cells in hard-zero mode);
// plain (ssl disabled) runs freeze B at 1.
GsAeParams init_params(const GsAeArchitecture& arch, const SslConfig& ssl,
                       RngStream& rng);

}  // namespace favar::gsae
