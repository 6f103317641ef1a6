#pragma once

#include <string>
#include <vector>

#include "favar/factors/loadings.hpp"
#include "favar/var/tiv.hpp"
#include "favar/var/tvp.hpp"

namespace favar::irf {

// Recursive-identification shock. The target must close the joint ordering
// (slow factors first, observables after, target equation last); anything
// else makes the triangular scheme identify a different shock than intended.
// size_original is the move in the variable's own units; target_std is the
// standardization scale that converts it into model units.
struct ShockSpec {
  int target = -1;
  double size_original = -1.0;
  double target_std = 1.0;
};

// Responses of the VAR block to the shock: (horizons + 1) x n, impact in
// row 0. Parameters are held fixed while the response propagates.
Matrix irf_var(const Matrix& A, const Matrix& omega, const ShockSpec& shock,
               int horizons);

// Same propagation with the draw's state at path row tau. Row 0 of the state
// path is the pre-sample state; row tau matches observation tau thereafter.
Matrix irf_var(const var::TvpDraw& draw, int n, int P, int tau,
               const ShockSpec& shock, int horizons);

// Per-draw response collection at one evaluation time.
struct IrfDraws {
  std::vector<Matrix> responses;  // each (horizons + 1) x variables
  int count() const { return static_cast<int>(responses.size()); }
};

IrfDraws irf_var_draws(const var::TivDraws& draws, const ShockSpec& shock,
                       int horizons);
IrfDraws irf_var_draws(const var::TvpDraws& draws, int tau,
                       const ShockSpec& shock, int horizons);

// Maps VAR-block responses onto the panel: response * Lambda' per draw,
// paired by index. With use_mean_lambda the loading draws are averaged once
// and that single matrix is applied to every VAR draw.
IrfDraws irf_panel(const IrfDraws& var_irfs,
                   const factors::LoadingDraws& loadings,
                   bool use_mean_lambda = false);

// Rescales each variable's responses by its standardization sigma, taking
// standardized-unit responses back to original units.
IrfDraws to_original_units(const IrfDraws& draws, const Vector& sigma);

// Pointwise posterior quantiles across draws; 16/50/84 gives the median with
// a 68% band. Linear interpolation between order statistics.
struct IrfSummary {
  Matrix q16, q50, q84;  // each (horizons + 1) x variables
};
IrfSummary summarize(const IrfDraws& draws);

struct IrfResult {
  std::vector<int> times;
  std::vector<IrfSummary> summaries;  // one per evaluation time
  int horizons = 0;
};

// Quantile surfaces at each requested state-path row. The time-invariant
// overload evaluates once and repeats the summary, so constancy across
// times is exact by construction.
IrfResult irf_over_time(const var::TvpDraws& draws, const ShockSpec& shock,
                        int horizons, const std::vector<int>& times);
IrfResult irf_over_time(const var::TivDraws& draws, const ShockSpec& shock,
                        int horizons, const std::vector<int>& times);

// Tidy export: time, horizon, variable, q16, q50, q84 — one row per cell.
void write_irf_csv(const std::string& path, const IrfResult& result,
                   const std::vector<std::string>& variables,
                   const std::vector<std::string>& preamble = {});

}  // namespace favar::irf
