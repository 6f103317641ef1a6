#pragma once

#include <string>
#include <vector>

#include "favar/forecast/expanding.hpp"
#include "favar/gsae/crossval.hpp"

namespace favar::cli {

// Full run description: one model cell plus data locations, experiment
// knobs, and the mandatory seed. Loaded from a JSON file; a few fields can
// be overridden from the command line afterwards.
struct RunConfig {
  std::string panel_csv;
  std::string manifest_csv;
  int ffill_limit = 0;

  std::string method = "pca";  // pca | plain_ae | gs_ae_linear | gs_ae_nonlinear
  std::string var_spec = "tiv";  // tiv | tvp
  int K = 2;
  int L = 2;
  std::string activation = "leaky_relu";  // tanh | leaky_relu
  double leaky_a = 1e-16;
  double lambda0 = 20.0;
  double lambda1 = 0.5;
  bool hard_zero_anchors = false;
  std::vector<std::string> anchor_groups;

  int epochs = 200;
  int batch_size = 24;
  double learning_rate = 1e-3;

  int P = 2;
  bool sample_xi = false;
  int n_burn = 1000;
  int n_draws = 5000;
  int thin = 5;

  int horizons = 4;
  int first_origin = 0;

  std::string irf_target = "FEDFUNDS";
  double irf_size = -1.0;  // original units; -1.00 is a 100bp cut
  int irf_horizons = 20;
  std::vector<int> irf_times;  // panel row indices
  bool irf_mean_lambda = false;

  // Cross-validation grids; the defaults span K 2-5, L 2-6, three
  // activations, and a 3 x 4 lambda grid.
  std::vector<int> cv_Ks = {2, 3, 4, 5};
  std::vector<int> cv_Ls = {2, 3, 4, 5, 6};
  std::vector<std::string> cv_activations = {"tanh", "leaky_relu:1e-16",
                                             "leaky_relu:0.3"};
  std::vector<double> cv_lambda0s = {5.0, 20.0, 50.0};
  std::vector<double> cv_lambda1s = {0.1, 0.5, 1.0, 2.0};
  int cv_folds = 5;
  bool cv_blocked_folds = false;
  int cv_epochs = 50;

  long long seed = -1;  // mandatory: negative means "not provided"
  std::string out_dir;
};

// Parses the JSON config. Unknown keys, type mismatches, and a missing seed
// are ConfigError; wall-clock seeding is deliberately impossible.
RunConfig load_run_config(const std::string& path);

// Validated enum views of the string fields; all throw ConfigError.
factors::FactorMethod method_of(const RunConfig& cfg);
gsae::ActivationChoice activation_of(const RunConfig& cfg);
gsae::ActivationChoice parse_activation(const std::string& text);
void check_var_spec(const RunConfig& cfg);

// The pipeline cell this config describes (anchor_count comes from the
// anchor group list; the panel supplies group structure at the call site).
forecast::PipelineConfig pipeline_config(const RunConfig& cfg);

gsae::CvGrids cv_grids(const RunConfig& cfg);

// Canonical serialization of every semantically relevant field (out_dir is
// excluded: relocating a run must not invalidate it). Equal configs hash
// equal; the hex hash stamps every artifact.
std::string canonical_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

}  // namespace favar::cli
