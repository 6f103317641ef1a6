#include "favar/gsae/adam.hpp"

#include <cmath>

namespace favar::gsae {

namespace {

// Applies fn(param_data, grad_data, size, slot) over every trainable tensor
// in a fixed order so AdamState slots stay aligned.
template <typename Fn>
void zip_tensors(GsAeParams& p, const GsAeGrads& g, Fn&& fn) {
  int slot = 0;
  for (std::size_t l = 0; l < p.enc_W.size(); ++l) {
    fn(p.enc_W[l].data(), g.enc_W[l].data(), p.enc_W[l].size(), slot++);
    fn(p.enc_b[l].data(), g.enc_b[l].data(), p.enc_b[l].size(), slot++);
  }
  for (std::size_t l = 0; l < p.dec_W.size(); ++l) {
    fn(p.dec_W[l].data(), g.dec_W[l].data(), p.dec_W[l].size(), slot++);
    fn(p.dec_b[l].data(), g.dec_b[l].data(), p.dec_b[l].size(), slot++);
  }
  fn(p.head_W.data(), g.head_W.data(), p.head_W.size(), slot++);
  fn(p.head_b.data(), g.head_b.data(), p.head_b.size(), slot++);
  fn(p.B.data(), g.B.data(), p.B.size(), slot++);
}

}  // namespace

AdamState AdamState::zeros_like(const GsAeArchitecture& arch) {
  AdamState s;
  const GsAeGrads shape = zero_grads(arch);
  auto add = [&s](const auto& t) {
    s.m.push_back(Matrix::Zero(t.rows(), t.cols()));
    s.v.push_back(Matrix::Zero(t.rows(), t.cols()));
  };
  for (std::size_t l = 0; l < shape.enc_W.size(); ++l) {
    add(shape.enc_W[l]);
    add(shape.enc_b[l]);
  }
  for (std::size_t l = 0; l < shape.dec_W.size(); ++l) {
    add(shape.dec_W[l]);
    add(shape.dec_b[l]);
  }
  add(shape.head_W);
  add(shape.head_b);
  add(shape.B);
  return s;
}

void adam_step(AdamState& state, GsAeParams& params, const GsAeGrads& grads,
               const AdamConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  zip_tensors(params, grads,
              [&](double* p, const double* g, Eigen::Index n, int slot) {
                double* m = state.m[slot].data();
                double* v = state.v[slot].data();
                for (Eigen::Index i = 0; i < n; ++i) {
                  m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                  v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                  const double mhat = m[i] / bc1;
                  const double vhat = v[i] / bc2;
                  p[i] += cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
                }
              });
}

}  // namespace favar::gsae
