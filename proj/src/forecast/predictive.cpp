#include "favar/forecast/predictive.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace favar::forecast {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

double logsumexp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

bool blew_up(const Vector& z) {
  return !z.allFinite() || z.cwiseAbs().maxCoeff() > kExplosiveLimit;
}

// Stacks the lag window into the regressor layout used by the VAR design:
// (z_{t-1}, ..., z_{t-P}), newest lag first.
Vector stack_lags(const std::deque<Vector>& lags) {
  const int n = static_cast<int>(lags.front().size());
  const int P = static_cast<int>(lags.size());
  Vector w(n * P);
  for (int p = 0; p < P; ++p) w.segment(p * n, n) = lags[p];
  return w;
}

void check_history(const Matrix& history, int n, int P, int h) {
  if (history.rows() != P || history.cols() != n) {
    throw ShapeMismatch("simulate_predictive: history must hold P rows");
  }
  if (h < 1) throw ShapeMismatch("simulate_predictive: horizon must be >= 1");
}

std::deque<Vector> history_lags(const Matrix& history) {
  std::deque<Vector> lags;
  for (int r = static_cast<int>(history.rows()) - 1; r >= 0; --r) {
    lags.push_back(history.row(r).transpose());
  }
  return lags;
}

// Square root of a PSD matrix; unlike cholesky() this accepts singular
// inputs (a zero Q pins the state, the nesting case to the constant model).
Matrix psd_root(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw NotPositiveDefinite("psd_root: eigen decomposition failed");
  }
  const double floor = es.eigenvalues().cwiseAbs().maxCoeff() * 1e-12;
  const Vector root = (es.eigenvalues().array() > floor)
                          .select(es.eigenvalues(), 0.0)
                          .cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace

Vector PredictiveDraws::point() const {
  if (count() == 0) throw ExplosiveForecast("predictive mixture is empty");
  return mean.colwise().mean().transpose();
}

double PredictiveDraws::log_density(int var, double value) const {
  if (count() == 0) throw ExplosiveForecast("predictive mixture is empty");
  if (var < 0 || var >= n()) {
    throw ShapeMismatch("log_density: variable index out of range");
  }
  std::vector<double> comps(cov.size());
  for (std::size_t d = 0; d < cov.size(); ++d) {
    const double v = cov[d](var, var);
    const double dev = value - mean(static_cast<int>(d), var);
    comps[d] = -0.5 * (kLogTwoPi + std::log(v)) - 0.5 * dev * dev / v;
  }
  return logsumexp(comps) - std::log(static_cast<double>(cov.size()));
}

double PredictiveDraws::log_density_joint(const Vector& value) const {
  if (count() == 0) throw ExplosiveForecast("predictive mixture is empty");
  if (value.size() != n()) {
    throw ShapeMismatch("log_density_joint: value dimension mismatch");
  }
  const int dim = n();
  std::vector<double> comps(cov.size());
  for (std::size_t d = 0; d < cov.size(); ++d) {
    const Eigen::LLT<Matrix> llt(cov[d]);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("log_density_joint: covariance not SPD");
    }
    const Vector dev = value - mean.row(static_cast<int>(d)).transpose();
    const Vector half = llt.matrixL().solve(dev);
    double logdet = 0.0;
    for (int i = 0; i < dim; ++i) logdet += std::log(llt.matrixL()(i, i));
    comps[d] = -0.5 * dim * kLogTwoPi - logdet - 0.5 * half.squaredNorm();
  }
  return logsumexp(comps) - std::log(static_cast<double>(cov.size()));
}

PredictiveDraws simulate_predictive(const var::TivDraws& draws,
                                    const Matrix& history, int h,
                                    RngStream& rng) {
  const int n = draws.n;
  const int P = draws.P;
  check_history(history, n, P, h);
  if (draws.count() == 0) throw ShapeMismatch("simulate_predictive: no draws");

  std::vector<Vector> means;
  std::vector<Matrix> covs;
  int discarded = 0;
  for (int d = 0; d < draws.count(); ++d) {
    const Matrix& A = draws.A[d];
    const Matrix& omega = draws.Omega[d];
    const Matrix L = cholesky(omega);
    std::deque<Vector> lags = history_lags(history);
    bool bad = false;
    Vector terminal_mean;
    for (int step = 1; step <= h; ++step) {
      const Vector w = stack_lags(lags);
      const Vector m = A * w;
      if (blew_up(m)) {
        bad = true;
        break;
      }
      if (step < h) {
        Vector eps(n);
        for (int i = 0; i < n; ++i) eps(i) = rng.normal();
        const Vector z = m + L * eps;
        if (blew_up(z)) {
          bad = true;
          break;
        }
        lags.pop_back();
        lags.push_front(z);
      } else {
        terminal_mean = m;
      }
    }
    if (bad) {
      ++discarded;
      continue;
    }
    means.push_back(terminal_mean);
    covs.push_back(omega);
  }
  if (means.empty()) {
    throw ExplosiveForecast("simulate_predictive: every draw discarded");
  }
  PredictiveDraws out;
  out.mean.resize(static_cast<int>(means.size()), n);
  for (std::size_t i = 0; i < means.size(); ++i)
    out.mean.row(static_cast<int>(i)) = means[i].transpose();
  out.cov = std::move(covs);
  out.discarded = discarded;
  return out;
}

PredictiveDraws simulate_predictive(const var::TvpDraws& draws,
                                    const Matrix& history, int h,
                                    RngStream& rng) {
  const int n = draws.n;
  const int P = draws.P;
  check_history(history, n, P, h);
  if (draws.count() == 0) throw ShapeMismatch("simulate_predictive: no draws");
  const int Te = draws.Te;

  std::vector<Vector> means;
  std::vector<Matrix> covs;
  int discarded = 0;
  for (int di = 0; di < draws.count(); ++di) {
    const var::TvpDraw& d = draws.draws[di];
    bool bad = false;
    Vector terminal_mean;
    Matrix terminal_cov;
    try {
      const Matrix La = psd_root(d.Q_a);
      std::vector<Matrix> Lh;
      for (const Matrix& q : d.Q_h) Lh.push_back(psd_root(q));
      const Matrix Ls = psd_root(d.Q_s);

      Vector a = d.a_path.row(Te).transpose();
      Vector hrow = d.h_path.row(Te).transpose();
      Vector logs = d.logs_path.row(Te).transpose();
      std::deque<Vector> lags = history_lags(history);
      for (int step = 1; step <= h; ++step) {
        // States innovate first: the step-ahead observation is governed by
        // the step-ahead parameters.
        Vector za(a.size());
        for (int i = 0; i < za.size(); ++i) za(i) = rng.normal();
        a += La * za;
        for (int r = 1; r < n; ++r) {
          Vector zh(r);
          for (int i = 0; i < r; ++i) zh(i) = rng.normal();
          hrow.segment(var::h_row_offset(r), r) += Lh[r - 1] * zh;
        }
        Vector zs(n);
        for (int i = 0; i < n; ++i) zs(i) = rng.normal();
        logs += Ls * zs;

        var::TvpDraw step_state;
        step_state.a_path = a.transpose();
        step_state.h_path = hrow.transpose();
        step_state.logs_path = logs.transpose();
        const Matrix A = step_state.A_at(0, n, P);
        const Matrix omega = step_state.omega_at(0, n);
        if (!A.allFinite() || !omega.allFinite()) {
          bad = true;
          break;
        }

        const Vector w = stack_lags(lags);
        const Vector m = A * w;
        if (blew_up(m)) {
          bad = true;
          break;
        }
        if (step < h) {
          const Matrix L = cholesky(omega);
          Vector eps(n);
          for (int i = 0; i < n; ++i) eps(i) = rng.normal();
          const Vector z = m + L * eps;
          if (blew_up(z)) {
            bad = true;
            break;
          }
          lags.pop_back();
          lags.push_front(z);
        } else {
          terminal_mean = m;
          terminal_cov = omega;
        }
      }
    } catch (const NotPositiveDefinite&) {
      // A volatility state that drifted past overflow or underflow leaves a
      // degenerate covariance; that draw is as unusable as an explosive one.
      bad = true;
    }
    if (bad) {
      ++discarded;
      continue;
    }
    means.push_back(terminal_mean);
    covs.push_back(terminal_cov);
  }
  if (means.empty()) {
    throw ExplosiveForecast("simulate_predictive: every draw discarded");
  }
  PredictiveDraws out;
  out.mean.resize(static_cast<int>(means.size()), n);
  for (std::size_t i = 0; i < means.size(); ++i)
    out.mean.row(static_cast<int>(i)) = means[i].transpose();
  out.cov = std::move(covs);
  out.discarded = discarded;
  return out;
}

}  // namespace favar::forecast
