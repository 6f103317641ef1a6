#include "favar/irf/irf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "favar/io/csv.hpp"

namespace favar::irf {
namespace {

void check_shock(const ShockSpec& shock, int n) {
  if (shock.target != n - 1) {
    throw BadOrdering("shock target must close the recursive ordering (index " +
                      std::to_string(n - 1) + ", got " +
                      std::to_string(shock.target) + ")");
  }
  if (!(shock.target_std > 0.0) || !std::isfinite(shock.target_std)) {
    throw ShapeMismatch("shock target_std must be positive and finite");
  }
}

// L is any lower-triangular factor with Omega = L L'. Dividing by the
// target's own entry cancels the factor's normalization, so a Cholesky
// factor and an H*S product give the same impact.
Vector impact_vector(const Matrix& L, const ShockSpec& shock) {
  const int n = static_cast<int>(L.rows());
  check_shock(shock, n);
  const double own = L(n - 1, n - 1);
  if (!(own > 0.0)) {
    throw NotPositiveDefinite("target innovation variance is degenerate");
  }
  const double scale = shock.size_original / shock.target_std;
  Vector impact = L.col(n - 1) * (scale / own);
  impact(n - 1) = scale;  // pin the target's own move; own/own is not exact
  return impact;
}

// Responses follow the shockless VAR recursion from the impact vector;
// coefficients stay frozen over the whole horizon.
Matrix propagate(const Matrix& A, const Vector& impact, int horizons) {
  const int n = static_cast<int>(impact.size());
  if (horizons < 0) throw ShapeMismatch("irf horizons must be >= 0");
  if (A.rows() != n || A.cols() < n || A.cols() % n != 0) {
    throw ShapeMismatch("coefficient matrix is not n x nP");
  }
  const int P = static_cast<int>(A.cols()) / n;
  Matrix resp(horizons + 1, n);
  resp.row(0) = impact.transpose();
  for (int h = 1; h <= horizons; ++h) {
    Vector acc = Vector::Zero(n);
    for (int p = 1; p <= std::min(h, P); ++p) {
      acc.noalias() += A.middleCols((p - 1) * n, n) * resp.row(h - p).transpose();
    }
    resp.row(h) = acc.transpose();
  }
  return resp;
}

// Interpolated quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

Matrix irf_var(const Matrix& A, const Matrix& omega, const ShockSpec& shock,
               int horizons) {
  const int n = static_cast<int>(omega.rows());
  if (omega.cols() != n || A.rows() != n) {
    throw ShapeMismatch("irf_var: coefficient and covariance shapes disagree");
  }
  return propagate(A, impact_vector(cholesky(omega), shock), horizons);
}

Matrix irf_var(const var::TvpDraw& draw, int n, int P, int tau,
               const ShockSpec& shock, int horizons) {
  const Matrix A = draw.A_at(tau, n, P);
  const Matrix Hinv = draw.Hinv_at(tau, n);
  const Vector s = draw.s_at(tau);
  // H*S is the triangular factor the recursive scheme is stated through.
  Matrix HS = Hinv.triangularView<Eigen::UnitLower>().solve(
      Matrix(Matrix::Identity(n, n)));
  HS = HS * s.asDiagonal();
  return propagate(A, impact_vector(HS, shock), horizons);
}

IrfDraws irf_var_draws(const var::TivDraws& draws, const ShockSpec& shock,
                       int horizons) {
  if (draws.count() == 0) throw ShapeMismatch("irf_var_draws: no draws");
  IrfDraws out;
  out.responses.reserve(draws.A.size());
  for (int d = 0; d < draws.count(); ++d) {
    out.responses.push_back(irf_var(draws.A[d], draws.Omega[d], shock, horizons));
  }
  return out;
}

IrfDraws irf_var_draws(const var::TvpDraws& draws, int tau,
                       const ShockSpec& shock, int horizons) {
  if (draws.count() == 0) throw ShapeMismatch("irf_var_draws: no draws");
  if (tau < 0 || tau > draws.Te) {
    throw TimeOutOfRange("irf evaluation time " + std::to_string(tau) +
                         " outside state path [0, " + std::to_string(draws.Te) +
                         "]");
  }
  IrfDraws out;
  out.responses.reserve(draws.draws.size());
  for (const auto& d : draws.draws) {
    out.responses.push_back(irf_var(d, draws.n, draws.P, tau, shock, horizons));
  }
  return out;
}

IrfDraws irf_panel(const IrfDraws& var_irfs,
                   const factors::LoadingDraws& loadings,
                   bool use_mean_lambda) {
  if (var_irfs.count() == 0) throw ShapeMismatch("irf_panel: no var draws");
  if (loadings.count() == 0) throw ShapeMismatch("irf_panel: no loading draws");
  const int n = static_cast<int>(var_irfs.responses.front().cols());
  for (const auto& l : loadings.lambda) {
    if (static_cast<int>(l.cols()) != n) {
      throw ShapeMismatch("irf_panel: loading width does not match var block");
    }
  }
  IrfDraws out;
  out.responses.reserve(var_irfs.responses.size());
  if (use_mean_lambda) {
    Matrix mean = Matrix::Zero(loadings.lambda.front().rows(), n);
    for (const auto& l : loadings.lambda) mean += l;
    mean /= static_cast<double>(loadings.count());
    for (const auto& r : var_irfs.responses) {
      out.responses.push_back(r * mean.transpose());
    }
    return out;
  }
  if (loadings.count() != var_irfs.count()) {
    throw DrawCountMismatch("irf_panel: " + std::to_string(var_irfs.count()) +
                            " var draws vs " + std::to_string(loadings.count()) +
                            " loading draws");
  }
  for (int d = 0; d < var_irfs.count(); ++d) {
    out.responses.push_back(var_irfs.responses[d] *
                            loadings.lambda[d].transpose());
  }
  return out;
}

IrfDraws to_original_units(const IrfDraws& draws, const Vector& sigma) {
  if (draws.count() == 0) throw ShapeMismatch("to_original_units: no draws");
  if (sigma.size() != draws.responses.front().cols()) {
    throw ShapeMismatch("to_original_units: sigma length does not match");
  }
  IrfDraws out;
  out.responses.reserve(draws.responses.size());
  for (const auto& r : draws.responses) {
    out.responses.push_back(r * sigma.asDiagonal());
  }
  return out;
}

IrfSummary summarize(const IrfDraws& draws) {
  const int D = draws.count();
  if (D == 0) throw ShapeMismatch("summarize: empty draw set");
  const auto rows = draws.responses.front().rows();
  const auto cols = draws.responses.front().cols();
  for (const auto& r : draws.responses) {
    if (r.rows() != rows || r.cols() != cols) {
      throw ShapeMismatch("summarize: draws have unequal shapes");
    }
  }
  IrfSummary s;
  s.q16 = Matrix(rows, cols);
  s.q50 = Matrix(rows, cols);
  s.q84 = Matrix(rows, cols);
  std::vector<double> buf(static_cast<std::size_t>(D));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int d = 0; d < D; ++d) buf[d] = draws.responses[d](r, c);
      std::sort(buf.begin(), buf.end());
      s.q16(r, c) = sorted_quantile(buf, 0.16);
      s.q50(r, c) = sorted_quantile(buf, 0.50);
      s.q84(r, c) = sorted_quantile(buf, 0.84);
    }
  }
  return s;
}

IrfResult irf_over_time(const var::TvpDraws& draws, const ShockSpec& shock,
                        int horizons, const std::vector<int>& times) {
  for (int t : times) {
    if (t < 0 || t > draws.Te) {
      throw TimeOutOfRange("irf evaluation time " + std::to_string(t) +
                           " outside state path [0, " +
                           std::to_string(draws.Te) + "]");
    }
  }
  IrfResult res;
  res.times = times;
  res.horizons = horizons;
  res.summaries.reserve(times.size());
  for (int t : times) {
    res.summaries.push_back(summarize(irf_var_draws(draws, t, shock, horizons)));
  }
  return res;
}

IrfResult irf_over_time(const var::TivDraws& draws, const ShockSpec& shock,
                        int horizons, const std::vector<int>& times) {
  const IrfSummary s = summarize(irf_var_draws(draws, shock, horizons));
  IrfResult res;
  res.times = times;
  res.horizons = horizons;
  res.summaries.assign(times.size(), s);
  return res;
}

void write_irf_csv(const std::string& path, const IrfResult& result,
                   const std::vector<std::string>& variables,
                   const std::vector<std::string>& preamble) {
  if (result.times.size() != result.summaries.size()) {
    throw ShapeMismatch("irf result times and summaries disagree");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  for (const auto& line : preamble) f << "# " << line << "\n";
  f << "time,horizon,variable,q16,q50,q84\n";
  for (std::size_t i = 0; i < result.summaries.size(); ++i) {
    const auto& s = result.summaries[i];
    if (s.q50.cols() != static_cast<Eigen::Index>(variables.size())) {
      throw ShapeMismatch("variable names do not match irf columns");
    }
    for (int h = 0; h < s.q50.rows(); ++h) {
      for (int c = 0; c < s.q50.cols(); ++c) {
        f << result.times[i] << ',' << h << ',' << variables[c] << ','
          << io::format_double(s.q16(h, c)) << ','
          << io::format_double(s.q50(h, c)) << ','
          << io::format_double(s.q84(h, c)) << '\n';
      }
    }
  }
  if (!f) throw Error("write failed: " + path);
}

}  // namespace favar::irf
