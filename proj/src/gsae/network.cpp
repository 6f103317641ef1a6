#include "favar/gsae/network.hpp"

#include <cmath>

namespace favar::gsae {

namespace {

Matrix activate(const Matrix& Z, const GsAeArchitecture& arch) {
  if (arch.activation == Activation::kTanh) {
    return Z.array().tanh();
  }
  const double a = arch.leaky_a;
  return Z.unaryExpr([a](double z) { return z > 0.0 ? z : a * z; });
}

// Derivative of the activation evaluated from pre-activation Z and output A.
Matrix activate_deriv(const Matrix& Z, const Matrix& A,
                      const GsAeArchitecture& arch) {
  if (arch.activation == Activation::kTanh) {
    return 1.0 - A.array().square();
  }
  const double a = arch.leaky_a;
  return Z.unaryExpr([a](double z) { return z > 0.0 ? 1.0 : a; });
}

Matrix affine(const Matrix& A_prev, const Matrix& W, const Vector& b) {
  return (A_prev * W.transpose()).rowwise() + b.transpose();
}

struct Cache {
  std::vector<Matrix> enc_Z, enc_A;            // per encoder layer
  std::vector<Matrix> masked;                  // per group, (B, K)
  std::vector<std::vector<Matrix>> dec_Z;      // [group][shared layer]
  std::vector<std::vector<Matrix>> dec_A;
  Matrix F;     // (B, K)
  Matrix xhat;  // (B, N)
};

void run_encoder(const GsAeParams& p, const Matrix& X, Cache& c) {
  const auto& arch = p.arch;
  c.enc_Z.resize(arch.L);
  c.enc_A.resize(arch.L);
  const Matrix* prev = &X;
  for (int l = 0; l < arch.L; ++l) {
    c.enc_Z[l] = affine(*prev, p.enc_W[l], p.enc_b[l]);
    c.enc_A[l] = (l + 1 < arch.L) ? activate(c.enc_Z[l], arch) : c.enc_Z[l];
    prev = &c.enc_A[l];
  }
  c.F = c.enc_A[arch.L - 1];
}

void run_decoder(const GsAeParams& p, const Matrix& F, Cache& c) {
  const auto& arch = p.arch;
  const int Bn = static_cast<int>(F.rows());
  c.masked.resize(arch.C);
  c.dec_Z.assign(arch.C, {});
  c.dec_A.assign(arch.C, {});
  c.xhat.resize(Bn, arch.N);
  for (int g = 0; g < arch.C; ++g) {
    c.masked[g] = F.array().rowwise() * p.B.row(g).array();
    const Matrix* prev = &c.masked[g];
    c.dec_Z[g].resize(arch.L - 1);
    c.dec_A[g].resize(arch.L - 1);
    for (int l = 0; l + 1 < arch.L; ++l) {
      c.dec_Z[g][l] = affine(*prev, p.dec_W[l], p.dec_b[l]);
      c.dec_A[g][l] = activate(c.dec_Z[g][l], arch);
      prev = &c.dec_A[g][l];
    }
    const Matrix& H = *prev;  // (B, head_input_dim)
    for (int i = 0; i < arch.N; ++i) {
      if (arch.group_of[i] != g) continue;
      c.xhat.col(i) = H * p.head_W.row(i).transpose() +
                      Vector::Constant(Bn, p.head_b(i));
    }
  }
}

void check_batch(const GsAeParams& p, const Matrix& x_batch) {
  if (x_batch.cols() != p.arch.N) {
    throw ShapeMismatch("batch width " + std::to_string(x_batch.cols()) +
                        " != panel width " + std::to_string(p.arch.N));
  }
  if (x_batch.rows() < 1) throw ShapeMismatch("empty batch");
}

}  // namespace

Matrix encode(const GsAeParams& params, const Matrix& x_batch) {
  check_batch(params, x_batch);
  Cache c;
  run_encoder(params, x_batch, c);
  return c.F;
}

Matrix decode(const GsAeParams& params, const Matrix& factors) {
  if (factors.cols() != params.arch.K) {
    throw ShapeMismatch("factor width " + std::to_string(factors.cols()) +
                        " != K = " + std::to_string(params.arch.K));
  }
  Cache c;
  run_decoder(params, factors, c);
  return c.xhat;
}

Matrix gamma_posterior(const Matrix& B, const SslConfig& ssl,
                       int anchor_count) {
  ssl.validate();
  const double l0 = ssl.lambda0, l1 = ssl.lambda1;
  Matrix P = B.unaryExpr([l0, l1](double b) {
    // psi1/(psi0+psi1) in the overflow-safe odds form
    return 1.0 / (1.0 + (l0 / l1) * std::exp(-(l0 - l1) * std::abs(b)));
  });
  for (int c = 0; c < anchor_count; ++c) {
    for (int k = 0; k < P.cols(); ++k) P(c, k) = (k == c) ? 1.0 : 0.0;
  }
  return P;
}

double ssl_penalty_sum(const Matrix& B, const Matrix& P, const SslConfig& ssl) {
  if (!ssl.enabled) return 0.0;
  const double log_psi1_0 = std::log(0.5 * ssl.lambda1);
  const double log_psi0_0 = std::log(0.5 * ssl.lambda0);
  double sum = 0.0;
  for (int c = 0; c < B.rows(); ++c) {
    for (int k = 0; k < B.cols(); ++k) {
      const double ab = std::abs(B(c, k));
      const double lp1 = log_psi1_0 - ssl.lambda1 * ab;
      const double lp0 = log_psi0_0 - ssl.lambda0 * ab;
      const double p = P(c, k);
      if (p > 0.0) sum += p * (lp1 - std::log(p));
      if (p < 1.0) sum += (1.0 - p) * (lp0 - std::log1p(-p));
    }
  }
  return sum;
}

double elbo(const GsAeParams& params, const SslConfig& ssl,
            const Matrix& x_batch) {
  check_batch(params, x_batch);
  Cache c;
  run_encoder(params, x_batch, c);
  run_decoder(params, c.F, c);
  const double Tb = static_cast<double>(x_batch.rows());
  const double N = static_cast<double>(params.arch.N);
  const double sse = (x_batch - c.xhat).squaredNorm();
  double value = -sse / (2.0 * Tb * N);
  if (ssl.enabled) {
    value += ssl_penalty_sum(params.B, params.P, ssl) / (Tb * N);
  }
  return value;
}

GsAeGrads grad_elbo(const GsAeParams& params, const SslConfig& ssl,
                    const Matrix& x_batch) {
  check_batch(params, x_batch);
  const auto& arch = params.arch;
  Cache c;
  run_encoder(params, x_batch, c);
  run_decoder(params, c.F, c);

  GsAeGrads g = zero_grads(arch);
  const double Tb = static_cast<double>(x_batch.rows());
  const double scale = 1.0 / (Tb * arch.N);

  // d elbo / d xhat for the reconstruction term
  const Matrix G = (x_batch - c.xhat) * scale;

  Matrix dF = Matrix::Zero(x_batch.rows(), arch.K);
  for (int grp = 0; grp < arch.C; ++grp) {
    const Matrix& H =
        (arch.L > 1) ? c.dec_A[grp][arch.L - 2] : c.masked[grp];
    Matrix dH = Matrix::Zero(H.rows(), H.cols());
    for (int i = 0; i < arch.N; ++i) {
      if (arch.group_of[i] != grp) continue;
      g.head_W.row(i) += G.col(i).transpose() * H;
      g.head_b(i) += G.col(i).sum();
      dH += G.col(i) * params.head_W.row(i);
    }
    // back through the shared stack
    Matrix dA = std::move(dH);
    for (int l = arch.L - 2; l >= 0; --l) {
      const Matrix dZ =
          dA.array() * activate_deriv(c.dec_Z[grp][l], c.dec_A[grp][l], arch).array();
      const Matrix& prev = (l > 0) ? c.dec_A[grp][l - 1] : c.masked[grp];
      g.dec_W[l] += dZ.transpose() * prev;
      g.dec_b[l] += dZ.colwise().sum().transpose();
      dA = dZ * params.dec_W[l];
    }
    // dA now sits at the masked input f (.) B_row
    g.B.row(grp) += (dA.array() * c.F.array()).colwise().sum().matrix();
    dF += (dA.array().rowwise() * params.B.row(grp).array()).matrix();
  }

  // encoder backward; output layer is affine so dZ_L = dF
  Matrix dZ = std::move(dF);
  for (int l = arch.L - 1; l >= 0; --l) {
    if (l < arch.L - 1) {
      dZ = dZ.array() * activate_deriv(c.enc_Z[l], c.enc_A[l], arch).array();
    }
    const Matrix& prev = (l > 0) ? c.enc_A[l - 1] : x_batch;
    g.enc_W[l] += dZ.transpose() * prev;
    g.enc_b[l] += dZ.colwise().sum().transpose();
    if (l > 0) dZ = dZ * params.enc_W[l];
  }

  if (!ssl.enabled) {
    g.B.setZero();  // plain autoencoder: B frozen at 1
    return g;
  }
  for (int grp = 0; grp < arch.C; ++grp) {
    for (int k = 0; k < arch.K; ++k) {
      const bool hard_zeroed = ssl.hard_zero_anchors &&
                               params.anchor_mask(grp, k) != 0.0 && grp != k;
      if (hard_zeroed) {
        g.B(grp, k) = 0.0;
        continue;
      }
      const double b = params.B(grp, k);
      const double sgn = (b > 0.0) ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
      const double p = params.P(grp, k);
      g.B(grp, k) -=
          (p * ssl.lambda1 + (1.0 - p) * ssl.lambda0) * sgn * scale;
    }
  }
  return g;
}

}  // namespace favar::gsae
