#include "favar/gsae/model.hpp"

#include <cmath>

#include "favar/gsae/network.hpp"

namespace favar::gsae {

std::vector<int> evenly_spaced_dims(int N, int K, int L) {
  if (L < 1 || K < 1 || N < K) {
    throw KOutOfRange("evenly_spaced_dims: need N >= K >= 1 and L >= 1");
  }
  std::vector<int> dims(L);
  for (int l = 1; l <= L; ++l) {
    dims[l - 1] = static_cast<int>(
        std::floor(N - static_cast<double>(l) * (N - K) / L));
  }
  dims[L - 1] = K;  // guard against floating point at the last step
  return dims;
}

void GsAeArchitecture::validate() const {
  if (N < 1 || K < 1 || C < 1 || L < 1) {
    throw ShapeMismatch("architecture: N, K, C, L must be positive");
  }
  if (static_cast<int>(encoder_dims.size()) != L || encoder_dims.back() != K) {
    throw ShapeMismatch("architecture: encoder needs L dims ending in K");
  }
  if (static_cast<int>(shared_decoder_dims.size()) != L - 1) {
    throw ShapeMismatch("architecture: shared decoder needs L-1 dims");
  }
  for (int d : encoder_dims) {
    if (d < 1) throw ShapeMismatch("architecture: non-positive encoder dim");
  }
  int prev = K;
  for (int d : shared_decoder_dims) {
    if (d <= prev) {
      throw ShapeMismatch(
          "architecture: shared decoder dims must strictly increase from K");
    }
    prev = d;
  }
  if (static_cast<int>(group_of.size()) != N) {
    throw ShapeMismatch("architecture: group_of must list all N variables");
  }
  for (int g : group_of) {
    if (g < 0 || g >= C) throw ShapeMismatch("architecture: group index out of range");
  }
  if (anchor_count < 0 || anchor_count > C || (anchor_count > 0 && anchor_count != K)) {
    throw ShapeMismatch(
        "architecture: anchors must be absent or exactly one group per factor");
  }
  if (activation == Activation::kLeakyRelu && leaky_a < 0) {
    throw ShapeMismatch("architecture: leaky slope must be non-negative");
  }
}

GsAeArchitecture GsAeArchitecture::mirrored(int N, int K, int L, Activation act,
                                            double leaky_a,
                                            std::vector<int> group_of, int C,
                                            int anchor_count) {
  GsAeArchitecture a;
  a.N = N;
  a.K = K;
  a.C = C;
  a.L = L;
  a.encoder_dims = evenly_spaced_dims(N, K, L);
  a.shared_decoder_dims.assign(a.encoder_dims.rbegin() + 1,
                               a.encoder_dims.rend());
  a.activation = act;
  a.leaky_a = leaky_a;
  a.group_of = std::move(group_of);
  a.anchor_count = anchor_count;
  a.validate();
  return a;
}

void SslConfig::validate() const {
  if (!enabled) return;
  if (!(lambda1 > 0.0) || !(lambda0 >= lambda1)) {
    throw ShapeMismatch("ssl: need lambda0 >= lambda1 > 0");
  }
}

GsAeGrads zero_grads(const GsAeArchitecture& arch) {
  GsAeGrads g;
  int prev = arch.N;
  for (int l = 0; l < arch.L; ++l) {
    g.enc_W.push_back(Matrix::Zero(arch.encoder_dims[l], prev));
    g.enc_b.push_back(Vector::Zero(arch.encoder_dims[l]));
    prev = arch.encoder_dims[l];
  }
  prev = arch.K;
  for (int l = 0; l + 1 < arch.L; ++l) {
    g.dec_W.push_back(Matrix::Zero(arch.shared_decoder_dims[l], prev));
    g.dec_b.push_back(Vector::Zero(arch.shared_decoder_dims[l]));
    prev = arch.shared_decoder_dims[l];
  }
  g.head_W = Matrix::Zero(arch.N, arch.head_input_dim());
  g.head_b = Vector::Zero(arch.N);
  g.B = Matrix::Zero(arch.C, arch.K);
  return g;
}

static void glorot_fill(Matrix& W, RngStream& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j)
      W(i, j) = limit * (2.0 * rng.uniform() - 1.0);
}

GsAeParams init_params(const GsAeArchitecture& arch, const SslConfig& ssl,
                       RngStream& rng) {
  arch.validate();
  ssl.validate();
  GsAeParams p;
  p.arch = arch;
  int prev = arch.N;
  for (int l = 0; l < arch.L; ++l) {
    Matrix W(arch.encoder_dims[l], prev);
    glorot_fill(W, rng);
    p.enc_W.push_back(std::move(W));
    p.enc_b.push_back(Vector::Zero(arch.encoder_dims[l]));
    prev = arch.encoder_dims[l];
  }
  prev = arch.K;
  for (int l = 0; l + 1 < arch.L; ++l) {
    Matrix W(arch.shared_decoder_dims[l], prev);
    glorot_fill(W, rng);
    p.dec_W.push_back(std::move(W));
    p.dec_b.push_back(Vector::Zero(arch.shared_decoder_dims[l]));
    prev = arch.shared_decoder_dims[l];
  }
  p.head_W.resize(arch.N, arch.head_input_dim());
  glorot_fill(p.head_W, rng);
  p.head_b = Vector::Zero(arch.N);

  p.anchor_mask = Matrix::Zero(arch.C, arch.K);
  for (int c = 0; c < arch.anchor_count; ++c) p.anchor_mask.row(c).setOnes();

  if (!ssl.enabled) {
    p.B = Matrix::Ones(arch.C, arch.K);
    p.P = Matrix::Constant(arch.C, arch.K, 0.5);
    return p;
  }
  p.B = Matrix::Constant(arch.C, arch.K, 0.1);
  for (int c = 0; c < arch.anchor_count; ++c) {
    for (int k = 0; k < arch.K; ++k) {
      if (k == c) {
        p.B(c, k) = 0.5;
      } else if (ssl.hard_zero_anchors) {
        p.B(c, k) = 0.0;
      }
    }
  }
  p.P = gamma_posterior(p.B, ssl, arch.anchor_count);
  return p;
}

}  // namespace favar::gsae
