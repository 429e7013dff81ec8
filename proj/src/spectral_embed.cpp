#include "unispec/spectral_embed.hpp"

#include "unispec/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace unispec {

Laplacian build_laplacian(const Matrix& Z) {
  if (Z.rows() != Z.cols() || Z.rows() == 0)
    throw InvalidArgument("build_laplacian: graph must be a non-empty square matrix");
  require_finite(Z, "build_laplacian");
  const Index n = Z.rows();
  Laplacian out;
  out.L.resize(n, n);
  out.degrees = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      // Z(i,j) + Z(j,i) is commutative, so L(Z) == L(Z^T) bit for bit.
      const double w = 0.5 * (Z(i, j) + Z(j, i));
      if (w < 0.0) out.has_negative_weights = true;
      out.L(i, j) = -w;
      out.L(j, i) = -w;
    }
  }
  for (Index i = 0; i < n; ++i) {
    double d = 0.0;
    for (Index j = 0; j < n; ++j) d -= out.L(i, j);
    out.degrees(i) = d;
  }
  for (Index i = 0; i < n; ++i) out.L(i, i) += out.degrees(i);
  return out;
}

namespace {

void check_embedding_shapes(const Laplacian& L, const Matrix& F, const Matrix& Q, const Matrix& P) {
  const Index n = L.n();
  const Index c = P.cols();
  if (P.rows() != n) throw InvalidArgument("update_P: P has the wrong row count");
  if (c < 1 || c > n) throw InvalidArgument("update_P: need 1 <= c <= n");
  require_shape(F, n, c, "update_P indicator F");
  require_shape(Q, c, c, "update_P rotation Q");
}

// L * X for thin X, column by column (avoids repacking L for a handful of columns).
Matrix thin_product(const Matrix& L, const Matrix& X) {
  Matrix out(L.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) out.col(j).noalias() = L * X.col(j);
  return out;
}

}  // namespace

double embedding_objective(const Laplacian& L, const Matrix& F, const Matrix& Q,
                           const Matrix& P, double beta, double gamma) {
  const double spectral = (P.array() * thin_product(L.L, P).array()).sum();
  const double discrete = (F - P * Q).squaredNorm();
  return beta * spectral + gamma * discrete;
}

Matrix embedding_gradient(const Laplacian& L, const Matrix& F, const Matrix& Q,
                          const Matrix& P, double beta, double gamma) {
  return 2.0 * beta * thin_product(L.L, P) - 2.0 * gamma * (F - P * Q) * Q.transpose();
}

StiefelResult update_P(const Laplacian& L, const IndicatorMatrix& F, const Rotation& Q,
                       double beta, double gamma, const Embedding& start,
                       const StiefelOptions& options) {
  check_embedding_shapes(L, F.F, Q.Q, start.P);
  require_finite(start.P, "update_P start");
  if (!(beta >= 0.0) || !(gamma >= 0.0))
    throw InvalidArgument("update_P: beta and gamma must be nonnegative");

  const Index c = start.P.cols();
  const Index n = start.P.rows();
  StiefelReport report;

  Matrix X = start.P;
  double feas = orthonormality_error(X);
  if (feas > options.feasibility_tolerance) {
    X = orthonormalize(X);
    ++report.reorthonormalizations;
    feas = orthonormality_error(X);
  }
  report.max_feasibility_error = feas;

  auto objective_with = [&](const Matrix& P, const Matrix& LP) {
    return beta * (P.array() * LP.array()).sum() + gamma * (F.F - P.lazyProduct(Q.Q)).squaredNorm();
  };
  auto gradient_with = [&](const Matrix& P, const Matrix& LP) -> Matrix {
    const Matrix R = F.F - P.lazyProduct(Q.Q);
    return 2.0 * beta * LP - 2.0 * gamma * R.lazyProduct(Q.Q.transpose());
  };

  const Matrix X0 = X;
  Matrix LX = thin_product(L.L, X);
  double f = objective_with(X, LX);
  report.objective_start = f;
  Matrix G = gradient_with(X, LX);
  Matrix GX = G.transpose().lazyProduct(X);
  Matrix dtX = G - X.lazyProduct(GX);
  double grad_norm = dtX.norm();

  double tau = 1e-3;
  int severe_losses = 0;
  Matrix U(n, 2 * c), V(n, 2 * c);
  const Matrix I2c = Matrix::Identity(2 * c, 2 * c);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (grad_norm <= options.gradient_tolerance) break;

    // directional derivative along the Cayley curve: -||A||_F^2 / 2
    const double deriv = -(G.squaredNorm() - (GX * GX).trace());
    if (!(deriv < 0.0)) break;

    // Cayley curve X(tau) = X - tau U (I + tau/2 V^T U)^{-1} V^T X with A = G X^T - X G^T = U V^T
    U << G, X;
    V << X, -G;
    const Matrix VU = V.transpose().lazyProduct(U);
    const Matrix VX = V.transpose().lazyProduct(X);

    Matrix Xnew, LXnew;
    double fnew = 0.0;
    bool accepted = false;
    for (int ls = 0; ls <= options.max_backtracks; ++ls) {
      const Matrix M = I2c + (0.5 * tau) * VU;
      Xnew = X - tau * U.lazyProduct(M.partialPivLu().solve(VX));
      LXnew = thin_product(L.L, Xnew);
      fnew = objective_with(Xnew, LXnew);
      // an ill-conditioned Cayley system at a huge step counts as a rejected trial
      if (std::isfinite(fnew) && fnew <= f + options.sufficient_decrease * tau * deriv &&
          orthonormality_error(Xnew) <= 1e-6) {
        accepted = true;
        break;
      }
      tau *= options.shrink;
    }
    if (!accepted) break;

    double err = orthonormality_error(Xnew);
    if (err > options.feasibility_tolerance) {
      if (err > 1e-6 && ++severe_losses > 1) {
        throw SolverError(fmt::format(
            "update_P: repeated loss of orthonormality (||P^T P - I||_F = {:.3e})", err));
      }
      Xnew = orthonormalize(Xnew);
      ++report.reorthonormalizations;
      err = orthonormality_error(Xnew);
      LXnew = thin_product(L.L, Xnew);
      fnew = objective_with(Xnew, LXnew);
      // re-orthonormalization undid the decrease: keep X and stop
      if (fnew > f) break;
    }
    report.max_feasibility_error = std::max(report.max_feasibility_error, err);
    if (fnew > f) report.monotone = false;

    const Matrix Gnew = gradient_with(Xnew, LXnew);
    const Matrix GXnew = Gnew.transpose().lazyProduct(Xnew);
    const Matrix dtXnew = Gnew - Xnew.lazyProduct(GXnew);

    // Barzilai-Borwein step, alternating the two classical quotients.
    const Matrix S = Xnew - X;
    const Matrix Yd = dtXnew - dtX;
    const double sy = std::abs((S.array() * Yd.array()).sum());
    if (sy > 0.0) {
      tau = (iter % 2 == 0) ? S.squaredNorm() / sy : sy / Yd.squaredNorm();
    }
    if (!std::isfinite(tau) || tau <= 0.0) tau = 1e-3;
    tau = std::clamp(tau, 1e-20, 1e20);

    X = std::move(Xnew);
    LX = std::move(LXnew);
    f = fnew;
    G = Gnew;
    GX = GXnew;
    dtX = dtXnew;
    grad_norm = dtX.norm();
    ++report.iterations;
  }

  f = embedding_objective(L, F.F, Q.Q, X, beta, gamma);
  if (f > report.objective_start) {
    X = X0;
    f = report.objective_start;
    grad_norm = std::numeric_limits<double>::infinity();
  }
  report.objective_end = f;
  report.projected_gradient = grad_norm;
  report.converged = grad_norm <= options.gradient_tolerance;
  return {Embedding{std::move(X)}, report};
}

Embedding init_P(const Laplacian& L, Index c, std::uint64_t seed, InitMode mode) {
  const Index n = L.n();
  if (c < 1 || c > n)
    throw InvalidArgument(fmt::format("init_P: cluster count {} outside [1, n = {}]", c, n));
  if (mode == InitMode::spectral) return Embedding{sym_eig_smallest(L.L, c).eigenvectors};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(n, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < n; ++i) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix P = qr.householderQ() * Matrix::Identity(n, c);
  return Embedding{std::move(P)};
}

KyFanGap kyfan_gap(const Laplacian& L, Index c) {
  const Index n = L.n();
  if (c < 1 || c > n)
    throw InvalidArgument(fmt::format("kyfan_gap: cluster count {} outside [1, n = {}]", c, n));
  const Matrix S = symmetrized(L.L, "kyfan_gap");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SolverError("kyfan_gap: eigensolver failed");
  const Vector& ev = eig.eigenvalues();
  KyFanGap out;
  out.sum_smallest = ev.head(c).sum();
  out.gap = c < n ? ev(c) - ev(c - 1) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace unispec
