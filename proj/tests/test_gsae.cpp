#include <doctest.h>

#include <cmath>
#include <vector>

#include "favar/gsae/adam.hpp"
#include "favar/gsae/network.hpp"

using favar::Matrix;
using favar::RngStream;
using favar::Vector;
using namespace favar::gsae;

namespace {

// Scalar re-implementation of the forward pass, used as an oracle against
// the Eigen version. Grids are row = observation, inner vector = unit.
using Grid = std::vector<std::vector<double>>;

Grid to_grid(const Matrix& m) {
  Grid g(m.rows(), std::vector<double>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  return g;
}

double naive_act(double z, const GsAeArchitecture& arch) {
  if (arch.activation == Activation::kTanh) return std::tanh(z);
  return z > 0.0 ? z : arch.leaky_a * z;
}

Grid naive_affine(const Grid& in, const Matrix& W, const Vector& b) {
  Grid out(in.size(), std::vector<double>(W.rows()));
  for (std::size_t t = 0; t < in.size(); ++t) {
    for (int i = 0; i < W.rows(); ++i) {
      double z = b(i);
      for (int j = 0; j < W.cols(); ++j) z += W(i, j) * in[t][j];
      out[t][i] = z;
    }
  }
  return out;
}

// Returns pre-activations of every hidden layer alongside the factor grid,
// so tests can keep finite differences away from activation kinks.
Grid naive_encode(const GsAeParams& p, const Matrix& X,
                  std::vector<Grid>* pre_acts = nullptr) {
  Grid a = to_grid(X);
  for (int l = 0; l < p.arch.L; ++l) {
    Grid z = naive_affine(a, p.enc_W[l], p.enc_b[l]);
    if (l + 1 < p.arch.L) {
      if (pre_acts) pre_acts->push_back(z);
      for (auto& row : z)
        for (auto& v : row) v = naive_act(v, p.arch);
    }
    a = std::move(z);
  }
  return a;
}

Grid naive_decode(const GsAeParams& p, const Grid& F,
                  std::vector<Grid>* pre_acts = nullptr) {
  const auto& arch = p.arch;
  Grid xhat(F.size(), std::vector<double>(arch.N, 0.0));
  for (int g = 0; g < arch.C; ++g) {
    Grid a(F.size(), std::vector<double>(arch.K));
    for (std::size_t t = 0; t < F.size(); ++t)
      for (int k = 0; k < arch.K; ++k) a[t][k] = F[t][k] * p.B(g, k);
    for (int l = 0; l + 1 < arch.L; ++l) {
      Grid z = naive_affine(a, p.dec_W[l], p.dec_b[l]);
      if (pre_acts) pre_acts->push_back(z);
      for (auto& row : z)
        for (auto& v : row) v = naive_act(v, arch);
      a = std::move(z);
    }
    for (int i = 0; i < arch.N; ++i) {
      if (arch.group_of[i] != g) continue;
      for (std::size_t t = 0; t < F.size(); ++t) {
        double z = p.head_b(i);
        for (int j = 0; j < static_cast<int>(a[t].size()); ++j)
          z += p.head_W(i, j) * a[t][j];
        xhat[t][i] = z;
      }
    }
  }
  return xhat;
}

long double naive_penalty(const GsAeParams& p, const SslConfig& ssl) {
  long double sum = 0.0L;
  for (int c = 0; c < p.B.rows(); ++c) {
    for (int k = 0; k < p.B.cols(); ++k) {
      const long double ab = std::abs((long double)p.B(c, k));
      const long double lp1 =
          std::log(0.5L * (long double)ssl.lambda1) - ssl.lambda1 * ab;
      const long double lp0 =
          std::log(0.5L * (long double)ssl.lambda0) - ssl.lambda0 * ab;
      const long double prob = p.P(c, k);
      if (prob > 0.0L) sum += prob * (lp1 - std::log(prob));
      if (prob < 1.0L) sum += (1.0L - prob) * (lp0 - std::log(1.0L - prob));
    }
  }
  return sum;
}

long double naive_elbo(const GsAeParams& p, const SslConfig& ssl,
                       const Matrix& X) {
  const Grid xhat = naive_decode(p, naive_encode(p, X));
  long double sse = 0.0L;
  for (int t = 0; t < X.rows(); ++t)
    for (int i = 0; i < X.cols(); ++i) {
      const long double d = X(t, i) - xhat[t][i];
      sse += d * d;
    }
  const long double TN = (long double)X.rows() * (long double)p.arch.N;
  long double value = -sse / (2.0L * TN);
  if (ssl.enabled) value += naive_penalty(p, ssl) / TN;
  return value;
}

GsAeArchitecture small_arch(Activation act, double leaky_a, int anchors) {
  std::vector<int> groups(12);
  for (int i = 0; i < 12; ++i) groups[i] = i / 3;
  return GsAeArchitecture::mirrored(12, 2, 2, act, leaky_a, groups, 4,
                                    anchors);
}

SslConfig small_ssl() {
  SslConfig s;
  s.lambda0 = 20.0;
  s.lambda1 = 0.5;
  return s;
}

Matrix random_panel(int T, int N, RngStream& rng) {
  Matrix X(T, N);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < N; ++i) X(t, i) = rng.normal();
  return X;
}

// Smallest absolute pre-activation over all hidden layers; leaky gradchecks
// only run on parameter draws that keep this away from the kink at zero.
double min_preactivation(const GsAeParams& p, const Matrix& X) {
  std::vector<Grid> zs;
  const Grid F = naive_encode(p, X, &zs);
  naive_decode(p, F, &zs);
  double lo = 1e300;
  for (const Grid& g : zs)
    for (const auto& row : g)
      for (double z : row) lo = std::min(lo, std::abs(z));
  return zs.empty() ? 1.0 : lo;
}

struct FlatView {
  std::vector<double*> coords;
  void add(Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) coords.push_back(m.data() + i);
  }
  void add(Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) coords.push_back(v.data() + i);
  }
};

FlatView flatten(GsAeParams& p) {
  FlatView f;
  for (auto& W : p.enc_W) f.add(W);
  for (auto& b : p.enc_b) f.add(b);
  for (auto& W : p.dec_W) f.add(W);
  for (auto& b : p.dec_b) f.add(b);
  f.add(p.head_W);
  f.add(p.head_b);
  f.add(p.B);
  return f;
}

std::vector<double> flat_grads(const GsAeGrads& g) {
  std::vector<double> out;
  auto add_m = [&out](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data()[i]);
  };
  auto add_v = [&out](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v.data()[i]);
  };
  for (const auto& W : g.enc_W) add_m(W);
  for (const auto& b : g.enc_b) add_v(b);
  for (const auto& W : g.dec_W) add_m(W);
  for (const auto& b : g.dec_b) add_v(b);
  add_m(g.head_W);
  add_v(g.head_b);
  add_m(g.B);
  return out;
}

// Central-difference check of grad_elbo over every trainable coordinate.
// Returns the worst relative error and the coordinate count via out-params.
double gradcheck(GsAeParams& params, const SslConfig& ssl, const Matrix& X,
                 int* n_coords) {
  const GsAeGrads grads = grad_elbo(params, ssl, X);
  const std::vector<double> ana = flat_grads(grads);
  FlatView view = flatten(params);
  REQUIRE(view.coords.size() == ana.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < view.coords.size(); ++i) {
    double* theta = view.coords[i];
    const double orig = *theta;
    const double h = 1e-6 * std::max(1.0, std::abs(orig));
    *theta = orig + h;
    const double up = elbo(params, ssl, X);
    *theta = orig - h;
    const double dn = elbo(params, ssl, X);
    *theta = orig;
    const double fd = (up - dn) / (2.0 * h);
    const double denom = std::max({1.0, std::abs(fd), std::abs(ana[i])});
    worst = std::max(worst, std::abs(fd - ana[i]) / denom);
  }
  *n_coords = static_cast<int>(view.coords.size());
  return worst;
}

}  // namespace

TEST_CASE("evenly spaced encoder dims match the published layout") {
  CHECK(evenly_spaced_dims(165, 5, 3) == std::vector<int>{111, 58, 5});
  CHECK(evenly_spaced_dims(10, 2, 1) == std::vector<int>{2});
  CHECK(evenly_spaced_dims(10, 2, 2) == std::vector<int>{6, 2});
  CHECK_THROWS_AS(evenly_spaced_dims(3, 5, 2), favar::KOutOfRange);
}

TEST_CASE("architecture validation rejects malformed shapes") {
  auto ok = small_arch(Activation::kTanh, 0.0, 2);
  CHECK_NOTHROW(ok.validate());

  auto bad = ok;
  bad.group_of[0] = 9;
  CHECK_THROWS_AS(bad.validate(), favar::ShapeMismatch);

  bad = ok;
  bad.anchor_count = 1;  // must equal K when anchored
  CHECK_THROWS_AS(bad.validate(), favar::ShapeMismatch);

  bad = ok;
  bad.shared_decoder_dims = {1};  // not increasing from K = 2
  CHECK_THROWS_AS(bad.validate(), favar::ShapeMismatch);

  bad = ok;
  bad.encoder_dims.back() = 3;
  CHECK_THROWS_AS(bad.validate(), favar::ShapeMismatch);
}

TEST_CASE("forward pass matches scalar re-implementation") {
  for (auto act : {Activation::kTanh, Activation::kLeakyRelu}) {
    RngStream rng(401, 0);
    const auto arch = small_arch(act, 0.1, 2);
    const SslConfig ssl = small_ssl();
    GsAeParams p = init_params(arch, ssl, rng);
    const Matrix X = random_panel(7, arch.N, rng);

    const Matrix F = encode(p, X);
    const Grid F_ref = naive_encode(p, X);
    for (int t = 0; t < F.rows(); ++t)
      for (int k = 0; k < F.cols(); ++k)
        CHECK(F(t, k) == doctest::Approx(F_ref[t][k]).epsilon(1e-12));

    const Matrix xhat = decode(p, F);
    const Grid xhat_ref = naive_decode(p, F_ref);
    for (int t = 0; t < xhat.rows(); ++t)
      for (int i = 0; i < xhat.cols(); ++i)
        CHECK(xhat(t, i) == doctest::Approx(xhat_ref[t][i]).epsilon(1e-12));

    const double e = elbo(p, ssl, X);
    CHECK(std::abs(e - (double)naive_elbo(p, ssl, X)) < 1e-12);
  }
}

TEST_CASE("inclusion probability closed forms") {
  SslConfig eq;
  eq.lambda0 = 3.0;
  eq.lambda1 = 3.0;
  Matrix B(2, 2);
  B << 0.0, -1.5, 0.7, 42.0;
  const Matrix Peq = gamma_posterior(B, eq, 0);
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < 2; ++k)
      CHECK(Peq(c, k) == doctest::Approx(0.5).epsilon(1e-15));

  SslConfig wide = small_ssl();
  wide.lambda0 = 1000.0;
  wide.lambda1 = 1.0;
  Matrix Bz = Matrix::Zero(1, 1);
  const Matrix Pz = gamma_posterior(Bz, wide, 0);
  CHECK(Pz(0, 0) == doctest::Approx(1.0 / 1001.0).epsilon(1e-14));

  // large |beta| pushes the probability toward the slab
  Matrix Bb = Matrix::Constant(1, 1, 5.0);
  CHECK(gamma_posterior(Bb, wide, 0)(0, 0) == doctest::Approx(1.0));

  // anchored rows are pinned to the identity pattern regardless of B
  Matrix B3 = Matrix::Constant(3, 2, 0.3);
  const Matrix Pa = gamma_posterior(B3, wide, 2);
  CHECK(Pa(0, 0) == 1.0);
  CHECK(Pa(0, 1) == 0.0);
  CHECK(Pa(1, 0) == 0.0);
  CHECK(Pa(1, 1) == 1.0);
  CHECK(Pa(2, 0) == Pa(2, 1));
}

TEST_CASE("regularization sum matches long-double reference") {
  RngStream rng(402, 0);
  const auto arch = small_arch(Activation::kTanh, 0.0, 2);
  const SslConfig ssl = small_ssl();
  GsAeParams p = init_params(arch, ssl, rng);
  // perturb B so the reference sees generic values, then refresh P
  for (int c = 0; c < p.B.rows(); ++c)
    for (int k = 0; k < p.B.cols(); ++k) p.B(c, k) += 0.3 * rng.normal();
  p.P = gamma_posterior(p.B, ssl, arch.anchor_count);

  const double got = ssl_penalty_sum(p.B, p.P, ssl);
  const long double want = naive_penalty(p, ssl);
  CHECK(std::abs((long double)got - want) <
        1e-12L * std::max(1.0L, std::abs(want)));

  SslConfig off;
  off.enabled = false;
  CHECK(ssl_penalty_sum(p.B, p.P, off) == 0.0);
}

TEST_CASE("analytic gradient agrees with central differences") {
  SUBCASE("tanh with soft anchors") {
    RngStream rng(403, 0);
    const auto arch = small_arch(Activation::kTanh, 0.0, 2);
    const SslConfig ssl = small_ssl();
    GsAeParams p = init_params(arch, ssl, rng);
    const Matrix X = random_panel(6, arch.N, rng);
    int n = 0;
    const double worst = gradcheck(p, ssl, X, &n);
    CHECK(n >= 200);
    CHECK(worst < 1e-5);
  }

  SUBCASE("leaky relu away from the kink") {
    // seed hunt keeps every pre-activation at least 1e-3 from zero so the
    // finite differences never straddle the non-smooth point
    const auto arch = small_arch(Activation::kLeakyRelu, 0.1, 2);
    const SslConfig ssl = small_ssl();
    GsAeParams p;
    Matrix X;
    bool found = false;
    for (std::uint64_t seed = 500; seed < 540; ++seed) {
      RngStream rng(seed, 0);
      p = init_params(arch, ssl, rng);
      X = random_panel(6, arch.N, rng);
      if (min_preactivation(p, X) > 1e-3) {
        found = true;
        break;
      }
    }
    REQUIRE(found);
    int n = 0;
    const double worst = gradcheck(p, ssl, X, &n);
    CHECK(n >= 200);
    CHECK(worst < 1e-5);
  }

  SUBCASE("plain autoencoder freezes B") {
    RngStream rng(404, 0);
    auto arch = small_arch(Activation::kTanh, 0.0, 0);
    arch.C = 1;
    arch.group_of.assign(arch.N, 0);
    SslConfig off;
    off.enabled = false;
    GsAeParams p = init_params(arch, off, rng);
    const Matrix X = random_panel(6, arch.N, rng);
    const GsAeGrads g = grad_elbo(p, off, X);
    CHECK(g.B.cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.B.array() == 1.0).all());
  }

  SUBCASE("hard-zero anchor cells get zero gradient") {
    RngStream rng(405, 0);
    const auto arch = small_arch(Activation::kTanh, 0.0, 2);
    SslConfig ssl = small_ssl();
    ssl.hard_zero_anchors = true;
    GsAeParams p = init_params(arch, ssl, rng);
    CHECK(p.B(0, 1) == 0.0);
    CHECK(p.B(1, 0) == 0.0);
    const Matrix X = random_panel(6, arch.N, rng);
    const GsAeGrads g = grad_elbo(p, ssl, X);
    CHECK(g.B(0, 1) == 0.0);
    CHECK(g.B(1, 0) == 0.0);
    CHECK(g.B(0, 0) != 0.0);
  }
}

TEST_CASE("zeroed sparsity row cuts the factor path for that group") {
  RngStream rng(406, 0);
  const auto arch = small_arch(Activation::kTanh, 0.0, 0);
  const SslConfig ssl = small_ssl();
  GsAeParams p = init_params(arch, ssl, rng);
  p.B.row(2).setZero();

  Matrix F1 = random_panel(5, arch.K, rng);
  Matrix F2 = random_panel(5, arch.K, rng);
  const Matrix x1 = decode(p, F1);
  const Matrix x2 = decode(p, F2);
  for (int i = 0; i < arch.N; ++i) {
    const double diff = (x1.col(i) - x2.col(i)).cwiseAbs().maxCoeff();
    if (arch.group_of[i] == 2) {
      CHECK(diff == 0.0);  // reconstruction no longer depends on the factors
    } else {
      CHECK(diff > 1e-8);
    }
  }
}

TEST_CASE("adam step behavior") {
  const auto arch = small_arch(Activation::kTanh, 0.0, 0);
  RngStream rng(407, 0);
  const SslConfig ssl = small_ssl();
  AdamConfig cfg;

  SUBCASE("zero gradient leaves parameters untouched") {
    GsAeParams p = init_params(arch, ssl, rng);
    const GsAeParams before = p;
    AdamState s = AdamState::zeros_like(arch);
    adam_step(s, p, zero_grads(arch), cfg);
    CHECK((p.head_W - before.head_W).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.enc_W[0] - before.enc_W[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.B - before.B).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constant gradient moves every coordinate by about lr") {
    GsAeParams p = init_params(arch, ssl, rng);
    const GsAeParams before = p;
    AdamState s = AdamState::zeros_like(arch);
    GsAeGrads g = zero_grads(arch);
    for (auto& W : g.enc_W) W.setConstant(2.5);
    g.head_W.setConstant(-2.5);
    adam_step(s, p, g, cfg);
    // bias-corrected mhat = g, vhat = g^2, so the step is lr * sign(g)
    const Matrix d_enc = p.enc_W[0] - before.enc_W[0];
    CHECK(d_enc.minCoeff() == doctest::Approx(cfg.lr).epsilon(1e-6));
    CHECK(d_enc.maxCoeff() == doctest::Approx(cfg.lr).epsilon(1e-6));
    const Matrix d_head = p.head_W - before.head_W;
    CHECK(d_head.maxCoeff() == doctest::Approx(-cfg.lr).epsilon(1e-6));
    // untouched tensors stay exactly in place
    CHECK((p.dec_W[0] - before.dec_W[0]).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("steps under a constant gradient accumulate linearly") {
    GsAeParams p = init_params(arch, ssl, rng);
    const double b0 = p.B(3, 0);
    AdamState s = AdamState::zeros_like(arch);
    GsAeGrads g = zero_grads(arch);
    g.B.setConstant(1.0);
    for (int it = 0; it < 5; ++it) adam_step(s, p, g, cfg);
    CHECK(p.B(3, 0) - b0 == doctest::Approx(5.0 * cfg.lr).epsilon(1e-6));
    CHECK(s.step == 5);
  }

  SUBCASE("identical sequences produce identical parameters") {
    RngStream r1(408, 0), r2(408, 0);
    GsAeParams p1 = init_params(arch, ssl, r1);
    GsAeParams p2 = init_params(arch, ssl, r2);
    AdamState s1 = AdamState::zeros_like(arch);
    AdamState s2 = AdamState::zeros_like(arch);
    GsAeGrads g = zero_grads(arch);
    g.enc_W[1].setConstant(0.37);
    g.B(0, 0) = -4.0;
    for (int it = 0; it < 3; ++it) {
      adam_step(s1, p1, g, AdamConfig{});
      adam_step(s2, p2, g, AdamConfig{});
    }
    CHECK((p1.enc_W[1] - p2.enc_W[1]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p1.B - p2.B).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("parameter initialization follows the documented scheme") {
  RngStream rng(409, 0);
  const auto arch = small_arch(Activation::kTanh, 0.0, 2);
  const SslConfig ssl = small_ssl();
  const GsAeParams p = init_params(arch, ssl, rng);

  // Glorot bound per layer
  for (std::size_t l = 0; l < p.enc_W.size(); ++l) {
    const double lim =
        std::sqrt(6.0 / (p.enc_W[l].rows() + p.enc_W[l].cols()));
    CHECK(p.enc_W[l].cwiseAbs().maxCoeff() <= lim);
    CHECK(p.enc_b[l].cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(p.B(0, 0) == 0.5);
  CHECK(p.B(1, 1) == 0.5);
  CHECK(p.B(0, 1) == 0.1);
  CHECK(p.B(2, 0) == 0.1);
  CHECK(p.P(0, 0) == 1.0);
  CHECK(p.P(0, 1) == 0.0);
  CHECK(p.anchor_mask(0, 0) == 1.0);
  CHECK(p.anchor_mask(2, 0) == 0.0);

  SslConfig hard = ssl;
  hard.hard_zero_anchors = true;
  RngStream rng2(409, 0);
  const GsAeParams ph = init_params(arch, hard, rng2);
  CHECK(ph.B(0, 1) == 0.0);
  CHECK(ph.B(1, 0) == 0.0);
  CHECK(ph.B(0, 0) == 0.5);
}
