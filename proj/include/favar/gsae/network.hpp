#pragma once

#include "favar/gsae/model.hpp"

namespace favar::gsae {

// Encoder pass: hidden layers use the configured activation, the output
// layer is affine. Rows of x_batch are observations.
Matrix encode(const GsAeParams& params, const Matrix& x_batch);

// Decoder pass: per group, the factor vector is masked by that group's B row
// and pushed through the shared layers; each variable's scalar head finishes
// the job.
Matrix decode(const GsAeParams& params, const Matrix& factors);

// Inclusion probabilities p = psi1(beta) / (psi0(beta) + psi1(beta)) with
// psi_s(b) = (lambda_s/2) exp(-lambda_s |b|); rows of the anchor block are
// overwritten with their fixed identity pattern.
Matrix gamma_posterior(const Matrix& B, const SslConfig& ssl, int anchor_count);

// Sum over (c,k) of p(log psi1 - log p) + (1-p)(log psi0 - log(1-p)), the
// unscaled regularization part of the objective. p entries of exactly 0 or 1
// contribute only their live branch.
double ssl_penalty_sum(const Matrix& B, const Matrix& P, const SslConfig& ssl);

// Objective for one batch: -(1/2T') * sum_t mse(x_t, xhat_t)
// + (1/(T' N)) * penalty, with T' the batch size, the mse averaged over the N
// variables, and P read from params (held fixed here).
double elbo(const GsAeParams& params, const SslConfig& ssl,
            const Matrix& x_batch);

// Exact reverse-mode gradient of elbo w.r.t. the trainable tensors; P is a
// constant. B collects the reconstruction pathway plus the SSL subgradient
// -(p*lambda1 + (1-p)*lambda0) * sign(beta) / (T' N), sign(0) = 0. Hard-zero
// anchor cells get exactly zero gradient; a disabled-SSL run freezes B.
GsAeGrads grad_elbo(const GsAeParams& params, const SslConfig& ssl,
                    const Matrix& x_batch);

}  // namespace favar::gsae
