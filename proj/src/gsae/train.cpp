#include "favar/gsae/train.hpp"

#include <cmath>
#include <numeric>

#include "favar/gsae/adam.hpp"

namespace favar::gsae {

namespace {

void epoch_losses(const GsAeParams& params, const SslConfig& ssl,
                  const Matrix& X, LossTrace& trace) {
  const double T = static_cast<double>(X.rows());
  const double N = static_cast<double>(params.arch.N);
  const Matrix xhat = decode(params, encode(params, X));
  const double recon = (X - xhat).squaredNorm() / (2.0 * T * N);
  const double reg =
      ssl.enabled ? -ssl_penalty_sum(params.B, params.P, ssl) / (T * N) : 0.0;
  const double total = recon + reg;
  if (!std::isfinite(total)) {
    throw DivergedLoss("training loss became non-finite at epoch " +
                       std::to_string(trace.total.size()));
  }
  trace.total.push_back(total);
  trace.reconstruction.push_back(recon);
  trace.regularization.push_back(reg);
}

void rezero_hard_anchors(GsAeParams& p, const SslConfig& ssl) {
  if (!ssl.enabled || !ssl.hard_zero_anchors) return;
  for (int c = 0; c < p.arch.anchor_count; ++c) {
    for (int k = 0; k < p.arch.K; ++k) {
      if (k != c) p.B(c, k) = 0.0;
    }
  }
}

}  // namespace

TrainResult train(const Matrix& X, const GsAeArchitecture& arch,
                  const SslConfig& ssl, const TrainConfig& cfg,
                  RngStream& rng) {
  arch.validate();
  ssl.validate();
  const int T = static_cast<int>(X.rows());
  if (X.cols() != arch.N) {
    throw ShapeMismatch("train: panel width " + std::to_string(X.cols()) +
                        " != architecture N " + std::to_string(arch.N));
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.batch_size > T) {
    throw ShapeMismatch("train: need epochs >= 0 and 1 <= batch_size <= T");
  }
  check_finite(X, "training panel");

  TrainResult out;
  out.params = init_params(arch, ssl, rng);
  AdamState opt = AdamState::zeros_like(arch);

  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng.shuffle(order);
    for (int start = 0; start < T; start += cfg.batch_size) {
      const int len = std::min(cfg.batch_size, T - start);
      Matrix batch(len, arch.N);
      for (int r = 0; r < len; ++r) batch.row(r) = X.row(order[start + r]);
      const GsAeGrads grads = grad_elbo(out.params, ssl, batch);
      adam_step(opt, out.params, grads, cfg.adam);
      rezero_hard_anchors(out.params, ssl);
      if (ssl.enabled) {
        out.params.P =
            gamma_posterior(out.params.B, ssl, arch.anchor_count);
      }
    }
    epoch_losses(out.params, ssl, X, out.trace);
  }
  return out;
}

bool InjectivityReport::pass() const {
  if (!activation_injective) return false;
  for (bool ok : layer_full_rank) {
    if (!ok) return false;
  }
  return true;
}

InjectivityReport check_injectivity(const GsAeParams& params) {
  InjectivityReport rep;
  const auto& arch = params.arch;
  rep.activation_injective =
      arch.activation == Activation::kTanh || arch.leaky_a > 0.0;
  for (const Matrix& W : params.dec_W) {
    Eigen::JacobiSVD<Matrix> svd(W);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    rep.max_singular.push_back(smax);
    rep.min_singular.push_back(smin);
    const bool tall = W.rows() >= W.cols();
    rep.layer_full_rank.push_back(tall && smin > 1e-8 * smax);
  }
  return rep;
}

factors::FactorSet extract_factors(const GsAeParams& params, const Matrix& X,
                                   const Matrix& Y,
                                   factors::FactorMethod method) {
  factors::FactorSet fs;
  fs.method = method;
  fs.latent = encode(params, X);
  fs.observable = Y;
  fs.degenerate = factors::standardize_factors(fs.latent);

  // sign alignment against the mean series of each anchored factor's group
  const auto& arch = params.arch;
  for (int k = 0; k < arch.anchor_count; ++k) {
    Vector group_mean = Vector::Zero(X.rows());
    int members = 0;
    for (int i = 0; i < arch.N; ++i) {
      if (arch.group_of[i] == k) {
        group_mean += X.col(i);
        ++members;
      }
    }
    if (members == 0) continue;
    group_mean /= members;
    group_mean.array() -= group_mean.mean();
    if (fs.latent.col(k).dot(group_mean) < 0.0) {
      fs.latent.col(k) = -fs.latent.col(k);
    }
  }
  return fs;
}

}  // namespace favar::gsae
