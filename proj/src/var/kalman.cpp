#include "favar/var/kalman.hpp"

#include <cmath>

namespace favar::var {

namespace {

struct FilterOut {
  Matrix m;                // (T+1) x d
  std::vector<Matrix> C;   // T+1 entries
};

void check_state_finite(const Vector& m, const Matrix& C, int t) {
  if (!m.allFinite() || !C.allFinite()) {
    throw FilterBlewUp("kalman filter: non-finite moments at t = " +
                       std::to_string(t));
  }
}

FilterOut forward_filter(const ObsBuilder& obs, int T, int d, const Matrix& Q,
                         const Vector& prior_mean, const Matrix& prior_cov) {
  if (T < 1 || d < 1) throw ShapeMismatch("kalman filter: need T, d >= 1");
  if (Q.rows() != d || Q.cols() != d || prior_mean.size() != d ||
      prior_cov.rows() != d || prior_cov.cols() != d) {
    throw ShapeMismatch("kalman filter: prior/Q dimensions disagree with d");
  }
  FilterOut out;
  out.m.resize(T + 1, d);
  out.C.resize(T + 1);
  out.m.row(0) = prior_mean.transpose();
  out.C[0] = prior_cov;

  for (int t = 1; t <= T; ++t) {
    const KalmanObs o = obs(t);
    const int k = static_cast<int>(o.y.size());
    if (o.Z.rows() != k || o.Z.cols() != d || o.G.rows() != k ||
        o.G.cols() != k) {
      throw ShapeMismatch("kalman filter: observation shapes at t = " +
                          std::to_string(t));
    }
    const Vector a = out.m.row(t - 1).transpose();
    Matrix R = out.C[t - 1] + Q;
    R = 0.5 * (R + R.transpose());

    const Vector resid = o.y - o.Z * a;
    Matrix F = o.Z * R * o.Z.transpose() + o.G;
    F = 0.5 * (F + F.transpose());
    const Eigen::LDLT<Matrix> Fdec(F);
    const Matrix K = (Fdec.solve(o.Z * R)).transpose();  // d x k

    const Vector m = a + K * resid;
    // Joseph form keeps the covariance symmetric PSD under roundoff
    const Matrix IKZ = Matrix::Identity(d, d) - K * o.Z;
    Matrix C = IKZ * R * IKZ.transpose() + K * o.G * K.transpose();
    C = 0.5 * (C + C.transpose());
    check_state_finite(m, C, t);
    out.m.row(t) = m.transpose();
    out.C[t] = C;
  }
  return out;
}

// Draw from N(mean, cov) for PSD (possibly singular) cov.
Vector sample_psd(const Vector& mean, const Matrix& cov, RngStream& rng) {
  const int d = static_cast<int>(mean.size());
  Vector z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) {
    return mean + llt.matrixL() * z;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) {
    throw FilterBlewUp("kalman sampler: eigen decomposition failed");
  }
  // Degenerate directions carry eigenvalues at rounding level; zero them so
  // an exactly singular conditional (Q = 0 paths) stays deterministic.
  const double floor = es.eigenvalues().cwiseAbs().maxCoeff() * 1e-12;
  const Vector root = (es.eigenvalues().array() > floor)
                          .select(es.eigenvalues(), 0.0)
                          .cwiseSqrt();
  return mean + es.eigenvectors() * root.asDiagonal() * z;
}

}  // namespace

SmootherMoments kalman_smoother(const ObsBuilder& obs, int T, int state_dim,
                                const Matrix& Q, const Vector& prior_mean,
                                const Matrix& prior_cov) {
  const FilterOut f =
      forward_filter(obs, T, state_dim, Q, prior_mean, prior_cov);
  SmootherMoments out;
  out.means.resize(T + 1, state_dim);
  out.covs.resize(T + 1);
  out.means.row(T) = f.m.row(T);
  out.covs[T] = f.C[T];
  for (int t = T - 1; t >= 0; --t) {
    Matrix R = f.C[t] + Q;
    R = 0.5 * (R + R.transpose());
    const Eigen::LDLT<Matrix> Rdec(R);
    const Matrix J = Rdec.solve(f.C[t]).transpose();  // C_t R^{-1}
    out.means.row(t) =
        f.m.row(t) +
        (J * (out.means.row(t + 1) - f.m.row(t)).transpose()).transpose();
    Matrix C = f.C[t] + J * (out.covs[t + 1] - R) * J.transpose();
    C = 0.5 * (C + C.transpose());
    check_state_finite(out.means.row(t).transpose(), C, t);
    out.covs[t] = C;
  }
  return out;
}

Matrix kalman_ffbs(const ObsBuilder& obs, int T, int state_dim,
                   const Matrix& Q, const Vector& prior_mean,
                   const Matrix& prior_cov, RngStream& rng) {
  const FilterOut f =
      forward_filter(obs, T, state_dim, Q, prior_mean, prior_cov);
  Matrix path(T + 1, state_dim);
  path.row(T) = sample_psd(f.m.row(T).transpose(), f.C[T], rng).transpose();
  for (int t = T - 1; t >= 0; --t) {
    Matrix R = f.C[t] + Q;
    R = 0.5 * (R + R.transpose());
    const Eigen::LDLT<Matrix> Rdec(R);
    const Matrix J = Rdec.solve(f.C[t]).transpose();
    const Vector mean =
        f.m.row(t).transpose() +
        J * (path.row(t + 1) - f.m.row(t)).transpose();
    Matrix C = f.C[t] - J * R * J.transpose();
    C = 0.5 * (C + C.transpose());
    if (!mean.allFinite() || !C.allFinite()) {
      throw FilterBlewUp("kalman ffbs: non-finite backward moments at t = " +
                         std::to_string(t));
    }
    // Q = 0 collapses the conditional onto its mean; what is left of C is
    // cancellation noise, so sampling from it would only add that noise back.
    const double scale = f.C[t].cwiseAbs().maxCoeff();
    if (scale > 0.0 && C.cwiseAbs().maxCoeff() < 1e-12 * scale) {
      path.row(t) = mean.transpose();
    } else {
      path.row(t) = sample_psd(mean, C, rng).transpose();
    }
  }
  return path;
}

}  // namespace favar::var
