#include <doctest.h>

#include <cmath>

#include "favar/gsae/crossval.hpp"
#include "favar/gsae/serialize.hpp"
#include "favar/gsae/train.hpp"
#include "favar/synthetic.hpp"
#include "support.hpp"

using favar::Matrix;
using favar::RngStream;
using favar::Vector;
using namespace favar::gsae;

namespace {

GsAeArchitecture toy_arch(int anchors, Activation act = Activation::kTanh) {
  std::vector<int> groups(12);
  for (int i = 0; i < 12; ++i) groups[i] = i / 3;
  return GsAeArchitecture::mirrored(12, 2, 2, act, 0.1, groups, 4, anchors);
}

Matrix toy_panel(int T, RngStream& rng) {
  // two latent drivers with idiosyncratic noise, standardized columns
  Matrix F(T, 2);
  for (int t = 0; t < T; ++t) {
    F(t, 0) = rng.normal();
    F(t, 1) = rng.normal();
  }
  Matrix load(2, 12);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 12; ++i) load(k, i) = rng.normal();
  Matrix X = F * load;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < 12; ++i) X(t, i) += 0.2 * rng.normal();
  Vector mu, sd;
  favar::standardize_columns(X, mu, sd);
  return X;
}

bool params_equal(const GsAeParams& a, const GsAeParams& b) {
  auto same = [](const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           (x - y).cwiseAbs().maxCoeff() == 0.0;
  };
  for (std::size_t l = 0; l < a.enc_W.size(); ++l) {
    if (!same(a.enc_W[l], b.enc_W[l])) return false;
    if (!same(a.enc_b[l], b.enc_b[l])) return false;
  }
  for (std::size_t l = 0; l < a.dec_W.size(); ++l) {
    if (!same(a.dec_W[l], b.dec_W[l])) return false;
    if (!same(a.dec_b[l], b.dec_b[l])) return false;
  }
  return same(a.head_W, b.head_W) && same(a.head_b, b.head_b) &&
         same(a.B, b.B) && same(a.P, b.P);
}

}  // namespace

TEST_CASE("training reduces the reconstruction loss") {
  RngStream rng(601, 0);
  const Matrix X = toy_panel(80, rng);
  const auto arch = toy_arch(2);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  TrainConfig cfg;
  cfg.epochs = 250;
  cfg.batch_size = 16;
  cfg.adam.lr = 3e-3;
  RngStream train_rng(602, 0);
  const TrainResult res = train(X, arch, ssl, cfg, train_rng);

  REQUIRE(res.trace.total.size() == 250);
  CHECK(res.trace.reconstruction.back() <
        0.3 * res.trace.reconstruction.front());
  // loss parts are consistent: total = reconstruction + regularization
  for (std::size_t e = 0; e < res.trace.total.size(); ++e) {
    CHECK(res.trace.total[e] == doctest::Approx(res.trace.reconstruction[e] +
                                                res.trace.regularization[e]));
  }
}

TEST_CASE("zero-epoch training returns the initialization") {
  RngStream rng(603, 0);
  const Matrix X = toy_panel(30, rng);
  const auto arch = toy_arch(0);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  TrainConfig cfg;
  cfg.epochs = 0;

  RngStream r1(604, 0), r2(604, 0);
  const TrainResult res = train(X, arch, ssl, cfg, r1);
  const GsAeParams fresh = init_params(arch, ssl, r2);
  CHECK(res.trace.total.empty());
  CHECK(params_equal(res.params, fresh));
}

TEST_CASE("training is deterministic in the stream seed") {
  RngStream rng(605, 0);
  const Matrix X = toy_panel(40, rng);
  const auto arch = toy_arch(2);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.batch_size = 8;

  RngStream r1(606, 3), r2(606, 3), r3(607, 3);
  const TrainResult a = train(X, arch, ssl, cfg, r1);
  const TrainResult b = train(X, arch, ssl, cfg, r2);
  const TrainResult c = train(X, arch, ssl, cfg, r3);
  CHECK(params_equal(a.params, b.params));
  CHECK(a.trace.total == b.trace.total);
  CHECK_FALSE(params_equal(a.params, c.params));
}

TEST_CASE("plain autoencoder keeps B frozen at one") {
  RngStream rng(608, 0);
  const Matrix X = toy_panel(40, rng);
  std::vector<int> one_group(12, 0);
  const auto arch = GsAeArchitecture::mirrored(
      12, 2, 2, Activation::kTanh, 0.0, one_group, 1, 0);
  SslConfig off;
  off.enabled = false;
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.batch_size = 10;
  RngStream train_rng(609, 0);
  const TrainResult res = train(X, arch, off, cfg, train_rng);
  CHECK((res.params.B.array() == 1.0).all());
  CHECK(res.trace.regularization.back() == 0.0);
}

TEST_CASE("hard-zero anchors stay exactly zero through training") {
  RngStream rng(610, 0);
  const Matrix X = toy_panel(50, rng);
  const auto arch = toy_arch(2);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  ssl.hard_zero_anchors = true;
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 10;
  RngStream train_rng(611, 0);
  const TrainResult res = train(X, arch, ssl, cfg, train_rng);
  CHECK(res.params.B(0, 1) == 0.0);
  CHECK(res.params.B(1, 0) == 0.0);
  CHECK(res.params.B(0, 0) != 0.0);
  // non-anchor rows keep moving freely
  CHECK(res.params.B(2, 0) != 0.1);
}

TEST_CASE("non-finite loss raises DivergedLoss") {
  RngStream rng(612, 0);
  const Matrix X = toy_panel(20, rng);
  std::vector<int> groups(12);
  for (int i = 0; i < 12; ++i) groups[i] = i / 3;
  // an absurd leaky slope overflows the reconstruction within one epoch
  const auto arch = GsAeArchitecture::mirrored(
      12, 2, 2, Activation::kLeakyRelu, 1e200, groups, 4, 0);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 10;
  RngStream train_rng(613, 0);
  CHECK_THROWS_AS(train(X, arch, ssl, cfg, train_rng), favar::DivergedLoss);
}

TEST_CASE("training input validation") {
  RngStream rng(614, 0);
  const Matrix X = toy_panel(20, rng);
  const auto arch = toy_arch(0);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  TrainConfig cfg;

  cfg.batch_size = 999;  // larger than T
  RngStream r1(615, 0);
  CHECK_THROWS_AS(train(X, arch, ssl, cfg, r1), favar::ShapeMismatch);

  cfg.batch_size = 8;
  Matrix bad = X;
  bad(3, 3) = std::nan("");
  RngStream r2(615, 0);
  CHECK_THROWS_AS(train(bad, arch, ssl, cfg, r2), favar::NonFiniteValue);

  RngStream r3(615, 0);
  Matrix narrow = X.leftCols(5);
  CHECK_THROWS_AS(train(narrow, arch, ssl, cfg, r3), favar::ShapeMismatch);
}

TEST_CASE("injectivity report") {
  RngStream rng(616, 0);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;

  SUBCASE("random tanh decoder passes") {
    const GsAeParams p = init_params(toy_arch(2), ssl, rng);
    const auto rep = check_injectivity(p);
    CHECK(rep.activation_injective);
    REQUIRE(rep.layer_full_rank.size() == 1);
    CHECK(rep.layer_full_rank[0]);
    CHECK(rep.min_singular[0] > 0.0);
    CHECK(rep.pass());
  }

  SUBCASE("zero leaky slope is not injective") {
    const GsAeParams p =
        init_params(toy_arch(2, Activation::kLeakyRelu), ssl, rng);
    GsAeParams flat = p;
    flat.arch.leaky_a = 0.0;
    CHECK_FALSE(check_injectivity(flat).pass());
    CHECK(check_injectivity(p).pass());  // positive slope is fine
  }

  SUBCASE("rank-deficient shared layer fails") {
    GsAeParams p = init_params(toy_arch(2), ssl, rng);
    p.dec_W[0].col(1) = p.dec_W[0].col(0);  // duplicate column kills the rank
    const auto rep = check_injectivity(p);
    CHECK_FALSE(rep.layer_full_rank[0]);
    CHECK_FALSE(rep.pass());
  }
}

TEST_CASE("factor extraction standardizes and sign-aligns") {
  RngStream rng(617, 0);
  const Matrix X = toy_panel(60, rng);
  Matrix Y(60, 1);
  for (int t = 0; t < 60; ++t) Y(t, 0) = rng.normal();

  const auto arch = toy_arch(2);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 12;
  RngStream train_rng(618, 0);
  const TrainResult res = train(X, arch, ssl, cfg, train_rng);

  const auto fs = extract_factors(res.params, X, Y,
                                  favar::factors::FactorMethod::kGsAeNonlinear);
  CHECK(fs.T() == 60);
  CHECK(fs.K() == 2);
  CHECK(fs.M() == 1);
  CHECK(fs.method == favar::factors::FactorMethod::kGsAeNonlinear);
  CHECK((fs.observable - Y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fs.degenerate.empty());

  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(fs.latent.col(k).mean()) < 1e-10);
    const double var = fs.latent.col(k).squaredNorm() / 60.0;
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
    // anchored factors point the same way as their group's mean series
    Vector gm = Vector::Zero(60);
    for (int i = 0; i < 12; ++i)
      if (arch.group_of[i] == k) gm += X.col(i);
    gm.array() -= gm.mean();
    CHECK(fs.latent.col(k).dot(gm) >= 0.0);
  }

  const Matrix joint = fs.joint();
  CHECK(joint.cols() == 3);
  CHECK((joint.leftCols(2) - fs.latent).cwiseAbs().maxCoeff() == 0.0);
  CHECK((joint.col(2) - Y.col(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter serialization round-trips bitwise") {
  RngStream rng(619, 0);
  const auto arch = toy_arch(2);
  SslConfig ssl;
  ssl.lambda0 = 30.0;
  ssl.lambda1 = 0.5;
  const GsAeParams p = init_params(arch, ssl, rng);

  testsupport::TempDir dir("gsae_io");
  const std::string path = dir.file("params.bin");
  save_params(path, p);
  const GsAeParams q = load_params(path);
  CHECK(params_equal(p, q));
  CHECK(q.arch.N == 12);
  CHECK(q.arch.anchor_count == 2);
  CHECK(q.arch.activation == Activation::kTanh);
  CHECK((q.anchor_mask - p.anchor_mask).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("wrong magic is rejected") {
    std::string raw = testsupport::read_file(path);
    raw[0] = 'X';
    testsupport::write_file(path, raw);
    CHECK_THROWS_AS(load_params(path), favar::BadArtifact);
  }

  SUBCASE("truncated artifact is rejected") {
    std::string raw = testsupport::read_file(path);
    raw.resize(raw.size() / 2);
    testsupport::write_file(path, raw);
    CHECK_THROWS_AS(load_params(path), favar::BadArtifact);
  }

  SUBCASE("missing file is rejected") {
    CHECK_THROWS_AS(load_params(dir.file("absent.bin")), favar::BadArtifact);
  }
}

TEST_CASE("two-stage cross-validation") {
  RngStream data_rng(620, 0);
  const Matrix X = toy_panel(40, data_rng);
  std::vector<int> groups(12);
  for (int i = 0; i < 12; ++i) groups[i] = i / 3;

  CvGrids grids;
  grids.Ks = {1, 2};
  grids.Ls = {1};
  grids.activations = {{Activation::kTanh, 0.0}};
  grids.lambda0s = {30.0, 300.0};
  grids.lambda1s = {0.5};
  grids.n_folds = 4;
  grids.train.epochs = 40;
  grids.train.batch_size = 10;

  RngStream cv_rng(621, 0);
  const CvResult res =
      cross_validate(X, groups, 4, true, false, grids, cv_rng);

  REQUIRE(res.stage1.size() == 2);
  REQUIRE(res.stage2.size() == 2);
  CHECK((res.best_K == 1 || res.best_K == 2));
  CHECK(res.best_L == 1);
  for (const auto& cell : res.stage1) {
    CHECK(cell.val_recon_mse > 0.0);
    CHECK(std::isfinite(cell.val_total_loss));
  }
  // the winner is the stage-1 minimum
  double best_mse = 1e300;
  int best_K = -1;
  for (const auto& cell : res.stage1) {
    if (cell.val_recon_mse < best_mse) {
      best_mse = cell.val_recon_mse;
      best_K = cell.K;
    }
  }
  CHECK(res.best_K == best_K);
  CHECK((res.best_lambda0 == 30.0 || res.best_lambda0 == 300.0));
  CHECK(res.best_lambda1 == 0.5);

  SUBCASE("reruns with the same seed agree exactly") {
    RngStream again(621, 0);
    const CvResult res2 =
        cross_validate(X, groups, 4, true, false, grids, again);
    CHECK(res2.best_K == res.best_K);
    CHECK(res2.best_lambda0 == res.best_lambda0);
    for (std::size_t i = 0; i < res.stage1.size(); ++i) {
      CHECK(res2.stage1[i].val_recon_mse == res.stage1[i].val_recon_mse);
    }
    for (std::size_t i = 0; i < res.stage2.size(); ++i) {
      CHECK(res2.stage2[i].val_recon_mse == res.stage2[i].val_recon_mse);
    }
  }

  SUBCASE("blocked folds also run") {
    CvGrids blocked = grids;
    blocked.blocked_folds = true;
    blocked.Ks = {2};
    blocked.lambda0s = {30.0};
    RngStream r(622, 0);
    const CvResult rb = cross_validate(X, groups, 4, true, false, blocked, r);
    CHECK(rb.best_K == 2);
    CHECK(rb.stage1.size() == 1);
  }

  SUBCASE("empty grid axes are rejected") {
    CvGrids empty = grids;
    empty.Ks.clear();
    RngStream r(623, 0);
    CHECK_THROWS_AS(cross_validate(X, groups, 4, true, false, empty, r),
                    favar::EmptyGrid);
    CvGrids empty2 = grids;
    empty2.lambda1s.clear();
    RngStream r2(623, 0);
    CHECK_THROWS_AS(cross_validate(X, groups, 4, true, false, empty2, r2),
                    favar::EmptyGrid);
  }
}

TEST_CASE("anchor labels drive the factor method names") {
  using favar::factors::FactorMethod;
  using favar::factors::method_from_name;
  using favar::factors::method_name;
  CHECK(method_name(FactorMethod::kPca) == "pca");
  CHECK(method_name(FactorMethod::kPlainAe) == "plain_ae");
  CHECK(method_from_name("gs_ae_nonlinear") == FactorMethod::kGsAeNonlinear);
  CHECK(method_from_name("gs_ae_linear") == FactorMethod::kGsAeLinear);
  CHECK_THROWS_AS(method_from_name("nope"), favar::Error);
}
