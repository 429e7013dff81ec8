#pragma once

#include "unispec/graph_learner.hpp"
#include "unispec/numerics.hpp"

#include <cstdint>

namespace unispec {

/// L = D - W with W = (Z + Z^T)/2 and D_ii = sum_j W_ij.
struct Laplacian {
  Matrix L;
  Vector degrees;
  bool has_negative_weights = false;  // Z had negative entries (still symmetrized)

  Index n() const { return L.rows(); }
};

/// Continuous labels with orthonormal columns (n x c).
struct Embedding {
  Matrix P;
};

/// Rotation Q (c x c orthogonal).
struct Rotation {
  Matrix Q;
};

/// Discrete labels as a one-hot n x c matrix.
struct IndicatorMatrix {
  Matrix F;
};

Laplacian build_laplacian(const Matrix& Z);

/// beta * Tr(P^T L P) + gamma * ||F - P Q||_F^2.
double embedding_objective(const Laplacian& L, const Matrix& F, const Matrix& Q,
                           const Matrix& P, double beta, double gamma);

/// Euclidean gradient 2 beta L P - 2 gamma (F - P Q) Q^T.
Matrix embedding_gradient(const Laplacian& L, const Matrix& F, const Matrix& Q,
                          const Matrix& P, double beta, double gamma);

struct StiefelOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;  // on ||G - P G^T P||_F
  double sufficient_decrease = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 20;
  double feasibility_tolerance = 1e-8;
};

/// Diagnostics of one update_P call.
struct StiefelReport {
  double objective_start = 0.0;
  double objective_end = 0.0;
  double projected_gradient = 0.0;
  double max_feasibility_error = 0.0;  // over the entry point and all accepted iterates
  int iterations = 0;                  // accepted steps
  int reorthonormalizations = 0;
  bool monotone = true;                // no accepted step raised the objective
  bool converged = false;              // gradient tolerance met
};

struct StiefelResult {
  Embedding P;
  StiefelReport report;
};

/// Minimizes beta Tr(P^T L P) + gamma ||F - P Q||^2 over P^T P = I starting
/// from `start`, by curvilinear search along the Cayley curve
///   P(tau) = (I + tau/2 A)^{-1} (I - tau/2 A) P,  A = G P^T - P G^T,
/// with Barzilai-Borwein step lengths and monotone Armijo backtracking.
/// A is never formed; the Sherman-Morrison-Woodbury form over the
/// n x 2c factors [G, P] and [P, -G] keeps every step O(n c^2).
StiefelResult update_P(const Laplacian& L, const IndicatorMatrix& F, const Rotation& Q,
                       double beta, double gamma, const Embedding& start,
                       const StiefelOptions& options = {});

/// c smallest eigenvectors of L (spectral) or the orthonormal factor of a
/// seeded Gaussian n x c matrix (random).
Embedding init_P(const Laplacian& L, Index c, std::uint64_t seed, InitMode mode = InitMode::spectral);

struct KyFanGap {
  double sum_smallest = 0.0;  // sum of the c smallest eigenvalues
  double gap = 0.0;           // lambda_{c+1} - lambda_c; +inf when c = n
};

KyFanGap kyfan_gap(const Laplacian& L, Index c);

}  // namespace unispec
