#include "favar/gsae/crossval.hpp"

#include <numeric>
#include <sstream>

namespace favar::gsae {

std::string ActivationChoice::label() const {
  if (act == Activation::kTanh) return "tanh";
  std::ostringstream ss;
  ss << "leaky_relu_" << leaky_a;
  return ss.str();
}

namespace {

// Row indices per fold: random partition by default, contiguous time blocks
// when blocked_folds is set.
std::vector<std::vector<int>> build_folds(int T, int n_folds, bool blocked,
                                          RngStream& rng) {
  if (n_folds < 2 || n_folds > T) {
    throw ShapeMismatch("cross-validation needs 2 <= folds <= T");
  }
  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);
  if (!blocked) rng.shuffle(order);
  std::vector<std::vector<int>> folds(n_folds);
  const int base = T / n_folds, extra = T % n_folds;
  int pos = 0;
  for (int f = 0; f < n_folds; ++f) {
    const int len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + len);
    pos += len;
  }
  return folds;
}

Matrix take_rows(const Matrix& X, const std::vector<int>& rows) {
  Matrix out(static_cast<int>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = X.row(rows[r]);
  return out;
}

// Mean validation losses of one (arch, ssl) cell across folds.
void evaluate_cell(const Matrix& X, const GsAeArchitecture& arch,
                   const SslConfig& ssl, const TrainConfig& base_cfg,
                   const std::vector<std::vector<int>>& folds,
                   RngStream cell_rng, CvCell& cell) {
  const int T = static_cast<int>(X.rows());
  double mse_sum = 0.0, total_sum = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<int> train_rows;
    train_rows.reserve(T);
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    }
    const Matrix Xtr = take_rows(X, train_rows);
    const Matrix Xval = take_rows(X, folds[f]);
    TrainConfig cfg = base_cfg;
    cfg.batch_size = std::min(cfg.batch_size, static_cast<int>(Xtr.rows()));
    RngStream fold_rng = cell_rng.derive(static_cast<std::uint64_t>(f));
    const TrainResult res = train(Xtr, arch, ssl, cfg, fold_rng);
    const Matrix xhat = decode(res.params, encode(res.params, Xval));
    mse_sum += (Xval - xhat).squaredNorm() /
               (static_cast<double>(Xval.rows()) * arch.N);
    total_sum += -elbo(res.params, ssl, Xval);
  }
  cell.val_recon_mse = mse_sum / static_cast<double>(folds.size());
  cell.val_total_loss = total_sum / static_cast<double>(folds.size());
}

}  // namespace

CvResult cross_validate(const Matrix& X, const std::vector<int>& group_of,
                        int C, bool anchored, bool hard_zero_anchors,
                        const CvGrids& grids, RngStream& rng) {
  const int T = static_cast<int>(X.rows());
  const int N = static_cast<int>(X.cols());
  if (grids.Ks.empty() || grids.Ls.empty() || grids.activations.empty()) {
    throw EmptyGrid("stage-1 grid has an empty axis");
  }
  if (grids.lambda0s.empty() || grids.lambda1s.empty()) {
    throw EmptyGrid("stage-2 grid has an empty axis");
  }
  const auto folds =
      build_folds(T, grids.n_folds, grids.blocked_folds, rng);

  CvResult out;
  // stage 1: plain autoencoders over (K, L, activation)
  std::size_t cell_id = 0;
  std::size_t best1 = 0;
  for (int K : grids.Ks) {
    for (int L : grids.Ls) {
      for (std::size_t ai = 0; ai < grids.activations.size(); ++ai) {
        const auto& act = grids.activations[ai];
        GsAeArchitecture arch = GsAeArchitecture::mirrored(
            N, K, L, act.act, act.leaky_a, std::vector<int>(N, 0), 1, 0);
        SslConfig plain;
        plain.enabled = false;
        CvCell cell;
        cell.K = K;
        cell.L = L;
        cell.activation_index = static_cast<int>(ai);
        evaluate_cell(X, arch, plain, grids.train, folds,
                      rng.derive(1000 + cell_id), cell);
        if (out.stage1.empty() ||
            cell.val_recon_mse < out.stage1[best1].val_recon_mse) {
          best1 = out.stage1.size();
        }
        out.stage1.push_back(cell);
        ++cell_id;
      }
    }
  }
  out.best_K = out.stage1[best1].K;
  out.best_L = out.stage1[best1].L;
  out.best_activation = grids.activations[out.stage1[best1].activation_index];

  // stage 2: grouped-sparse model over (lambda0, lambda1)
  const int anchor_count = anchored ? out.best_K : 0;
  if (anchored && out.best_K > C) {
    throw ShapeMismatch("cross_validate: anchors need at least K groups");
  }
  GsAeArchitecture gs_arch = GsAeArchitecture::mirrored(
      N, out.best_K, out.best_L, out.best_activation.act,
      out.best_activation.leaky_a, group_of, C, anchor_count);
  std::size_t best2 = 0;
  for (double l0 : grids.lambda0s) {
    for (double l1 : grids.lambda1s) {
      SslConfig ssl;
      ssl.lambda0 = l0;
      ssl.lambda1 = l1;
      ssl.hard_zero_anchors = hard_zero_anchors;
      CvCell cell;
      cell.K = out.best_K;
      cell.L = out.best_L;
      cell.lambda0 = l0;
      cell.lambda1 = l1;
      evaluate_cell(X, gs_arch, ssl, grids.train, folds,
                    rng.derive(2000000 + cell_id), cell);
      if (out.stage2.empty() ||
          cell.val_recon_mse < out.stage2[best2].val_recon_mse) {
        best2 = out.stage2.size();
      }
      out.stage2.push_back(cell);
      ++cell_id;
    }
  }
  out.best_lambda0 = out.stage2[best2].lambda0;
  out.best_lambda1 = out.stage2[best2].lambda1;
  return out;
}

}  // namespace favar::gsae
