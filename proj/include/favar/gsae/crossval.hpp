#pragma once

#include "favar/gsae/train.hpp"

namespace favar::gsae {

struct ActivationChoice {
  Activation act = Activation::kLeakyRelu;
  double leaky_a = 1e-16;
  std::string label() const;
};

struct CvGrids {
  std::vector<int> Ks;
  std::vector<int> Ls;
  std::vector<ActivationChoice> activations;
  std::vector<double> lambda0s;
  std::vector<double> lambda1s;
  int n_folds = 5;
  bool blocked_folds = false;  // contiguous time blocks instead of random rows
  TrainConfig train;           // per-fold training budget
};

struct CvCell {
  int K = 0;
  int L = 0;
  int activation_index = -1;  // stage-1 cells
  double lambda0 = 0.0;       // stage-2 cells
  double lambda1 = 0.0;
  double val_recon_mse = 0.0;  // selection criterion
  double val_total_loss = 0.0;  // penalized loss, recorded alongside
};

struct CvResult {
  std::vector<CvCell> stage1;
  std::vector<CvCell> stage2;
  int best_K = 0;
  int best_L = 0;
  ActivationChoice best_activation;
  double best_lambda0 = 0.0;
  double best_lambda1 = 0.0;
};

// Two-stage 5-fold cross-validation: stage 1 picks (K, L, activation) with
// plain autoencoders; stage 2 fixes those and picks (lambda0, lambda1) on the
// grouped-sparse model. Selection minimizes mean validation reconstruction
// MSE. `anchored` wires the first best_K groups as anchors in stage 2.
CvResult cross_validate(const Matrix& X, const std::vector<int>& group_of,
                        int C, bool anchored, bool hard_zero_anchors,
                        const CvGrids& grids, RngStream& rng);

}  // namespace favar::gsae
