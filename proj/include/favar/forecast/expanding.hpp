#pragma once

#include <string>
#include <utility>
#include <vector>

#include "favar/forecast/predictive.hpp"
#include "favar/gsae/model.hpp"
#include "favar/panel.hpp"

namespace favar::forecast {

// One model cell of the experiment grid: a dimension-reduction method paired
// with a VAR specification, plus the knobs both stages need.
struct PipelineConfig {
  factors::FactorMethod method = factors::FactorMethod::kPca;
  int K = 2;
  int L = 2;
  gsae::Activation activation = gsae::Activation::kLeakyRelu;
  double leaky_a = 1e-16;
  double lambda0 = 20.0;
  double lambda1 = 0.5;
  bool hard_zero_anchors = false;
  int anchor_count = 0;
  gsae::TrainConfig train;

  std::string var_spec = "tiv";  // or "tvp"
  int P = 2;
  bool sample_xi = false;
  int n_burn = 1000;
  int n_draws = 5000;
  int thin = 5;  // applied to the TVP chain

  int horizons = 4;
  int first_origin = 0;  // row index of the first forecast origin
};

// Architecture and prior implied by one pipeline cell on an x block of width
// N. The linear variant keeps the depth and swaps in a slope-1 leaky unit;
// the plain autoencoder collapses the grouping and disables the prior.
struct GsAeSetup {
  gsae::GsAeArchitecture arch;
  gsae::SslConfig ssl;
};
GsAeSetup window_gsae_setup(int N, const std::vector<int>& group_of,
                            int n_groups, const PipelineConfig& cfg);

// Fits the configured dimension-reduction method on one window. X and Y are
// already standardized; group_of / n_groups describe the panel's x block.
factors::FactorSet fit_window_factors(const Matrix& X, const Matrix& Y,
                                      const std::vector<int>& group_of,
                                      int n_groups, const PipelineConfig& cfg,
                                      RngStream& rng);

// One (origin, horizon) outcome over the observable variables. Values are in
// the origin window's standardized units.
struct ForecastRecord {
  int origin = 0;
  int horizon = 0;
  Vector realized;
  Vector point;
  Vector logpdf;  // marginal log predictive density at the realized value
};

struct ForecastRun {
  std::vector<std::string> variables;  // observable names, record layout
  int horizons = 0;
  std::vector<ForecastRecord> records;
  std::vector<std::pair<int, std::string>> failures;  // origin, reason
  int discarded_draws = 0;
};

// Expanding-window experiment: for every origin, re-standardize the window,
// refit factors, re-estimate the VAR, and forecast h = 1..horizons where the
// target row exists. Origins fail independently; nothing after the origin
// row is ever read before its forecasts are made.
ForecastRun run_expanding_window(const Panel& panel, const PipelineConfig& cfg,
                                 RngStream& rng);

struct MetricTable {
  std::vector<std::string> variables;
  int horizons = 0;
  Matrix mae;       // variables x horizons
  Matrix alpl;      // variables x horizons
  Matrix rel_mae;   // model MAE / benchmark MAE (empty without benchmark)
  Matrix rel_alpl;  // model ALPL - benchmark ALPL
};

MetricTable compute_metrics(const ForecastRun& run);

// Relative variant; throws OriginMismatch unless both runs scored exactly
// the same (origin, horizon) pairs.
MetricTable compute_metrics(const ForecastRun& run,
                            const ForecastRun& benchmark);

// Running sum over origins of the per-origin ALPL difference at one horizon;
// the final row equals (#origins) times the ALPL gap.
struct CumulativeAlpl {
  std::vector<int> origins;
  Matrix values;  // origins x variables
};

CumulativeAlpl cumulative_alpl(const ForecastRun& run,
                               const ForecastRun& benchmark, int h);

// Tidy CSV exports; numbers go through the round-trip double format so
// repeated runs are byte-identical.
void write_forecast_csv(const std::string& path, const ForecastRun& run,
                        const std::vector<std::string>& preamble = {});

// Rebuilds a ForecastRun from the tidy export; failure and discard counts
// are not round-tripped. Throws BadArtifact on a malformed file.
ForecastRun read_forecast_csv(const std::string& path);
void write_metrics_csv(const std::string& path, const MetricTable& table,
                       const std::vector<std::string>& preamble = {});

}  // namespace favar::forecast
