#include "favar/synthetic.hpp"

#include <cmath>

namespace favar {

static Matrix stable_var1_matrix(int K, double radius, RngStream& rng) {
  if (radius >= 1.0) {
    throw UnstableSpec("factor VAR(1) spectral radius " +
                       std::to_string(radius) + " must be < 1");
  }
  Matrix A(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) A(i, j) = rng.normal() / std::sqrt(double(K));
  const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 0) A *= radius / rho;
  return A;
}

std::pair<Panel, SyntheticTruth> generate_synthetic(const SyntheticConfig& cfg,
                                                    RngStream& rng) {
  if (cfg.K > cfg.C) {
    throw KOutOfRange("need K <= C, got K=" + std::to_string(cfg.K) +
                      ", C=" + std::to_string(cfg.C));
  }
  if (cfg.N < cfg.C) throw ShapeMismatch("need at least one variable per group");

  const Matrix A = stable_var1_matrix(cfg.K, cfg.var1_radius, rng);

  // burn in so the factor path starts from the stationary distribution
  const int burn = 200;
  Matrix f(cfg.T, cfg.K);
  Vector state = Vector::Zero(cfg.K);
  for (int t = 0; t < burn + cfg.T; ++t) {
    Vector innov(cfg.K);
    for (int k = 0; k < cfg.K; ++k) innov(k) = rng.normal();
    state = A * state + innov;
    if (t >= burn) f.row(t - burn) = state.transpose();
  }

  Matrix B = Matrix::Zero(cfg.C, cfg.K);
  for (int c = 0; c < cfg.C; ++c) {
    if (c < cfg.K) {
      B(c, c) = 0.8 + 0.4 * rng.uniform();  // anchor: one nonzero on its factor
    } else {
      for (int k = 0; k < cfg.K; ++k) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        B(c, k) = sign * (0.3 + 0.7 * rng.uniform());
      }
    }
  }

  // contiguous group blocks; remainder spread over the first groups
  std::vector<int> group_of(cfg.N);
  {
    const int base = cfg.N / cfg.C, extra = cfg.N % cfg.C;
    int i = 0;
    for (int c = 0; c < cfg.C; ++c) {
      const int len = base + (c < extra ? 1 : 0);
      for (int j = 0; j < len; ++j) group_of[i++] = c;
    }
  }

  const int total_cols = cfg.N + cfg.n_observables;
  Matrix x(cfg.T, total_cols);
  std::vector<VariableSpec> specs(total_cols);
  for (int i = 0; i < cfg.N; ++i) {
    const int c = group_of[i];
    const double a = 0.5 + rng.uniform();        // monotone slope
    const double b = 0.5 + 1.5 * rng.uniform();  // tanh weight
    const double w = 0.5 + 1.5 * rng.uniform();  // tanh steepness
    const double shift = 0.3 * rng.normal();
    for (int t = 0; t < cfg.T; ++t) {
      const double u = f.row(t).dot(B.row(c));  // masked factor sum
      double d = (cfg.decoder_kind == DecoderKind::kLinear)
                     ? a * u + shift
                     : a * u + b * std::tanh(w * u) + shift;
      x(t, i) = d + cfg.noise_std * rng.normal();
    }
    specs[i].name = "v" + std::to_string(i);
    specs[i].group_label = "g" + std::to_string(c);
    specs[i].group = c;
    specs[i].transform_code = 1;
    specs[i].speed = Speed::kFast;
    specs[i].role = Role::kPanelX;
  }
  for (int j = 0; j < cfg.n_observables; ++j) {
    const int i = cfg.N + j;
    Vector w(cfg.K);
    for (int k = 0; k < cfg.K; ++k) w(k) = rng.normal();
    for (int t = 0; t < cfg.T; ++t) {
      x(t, i) = f.row(t).dot(w) + 0.3 * rng.normal();
    }
    specs[i].name = "y" + std::to_string(j);
    specs[i].group_label = "";
    specs[i].group = -1;
    specs[i].transform_code = 1;
    specs[i].speed = Speed::kFast;
    specs[i].role = Role::kObservableY;
  }

  std::vector<std::string> dates(cfg.T);
  for (int t = 0; t < cfg.T; ++t) {
    const int year = 1960 + t / 4, q = t % 4;
    dates[t] = std::to_string(year) + "-" + (q == 0 ? "01" : q == 1 ? "04" : q == 2 ? "07" : "10") + "-01";
  }

  SyntheticTruth truth;
  truth.true_factors = f;
  truth.true_B = B;
  truth.noise_std = cfg.noise_std;
  truth.decoder_kind = cfg.decoder_kind;
  return {make_panel(x, std::move(specs), std::move(dates)), truth};
}

}  // namespace favar
