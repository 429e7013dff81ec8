#pragma once

#include "unispec/kernel_bank.hpp"
#include "unispec/numerics.hpp"

#include <cstdint>
#include <memory>

namespace unispec {

/// How the continuous labels P are initialized.
enum class InitMode { spectral, random };

/// How the rotation Q is initialized.
enum class RotationInit { identity, random };

/// Model and solver settings shared by all three solvers.
struct HyperParams {
  double alpha = 1.0;   // l1 weight on the graph
  double beta = 1.0;    // spectral (Laplacian) term weight
  double gamma = 1e-4;  // discretization term weight
  double mu = 1.0;      // ALM penalty
  double rho = 1.0;     // ALM penalty growth per outer iteration; 1 keeps mu fixed
  double mu_max = 1e6;
  Index clusters = 2;
  int max_outer = 100;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  InitMode init = InitMode::spectral;
  RotationInit rotation_init = RotationInit::identity;

  /// Throws InvalidArgument on non-positive weights or 2 <= c <= n failing.
  void validate(Index n) const;
};

/// The ALM triple (Z, S, Y) and its penalty mu.
struct GraphState {
  Matrix Z;  // learned similarity graph
  Matrix S;  // split copy of Z carrying the l1 / sign / diagonal constraints
  Matrix Y;  // multiplier for S = Z
  double mu = 1.0;

  Index n() const { return Z.rows(); }
  /// Shapes and mu only.
  void check_shape() const;
  /// check_shape() plus finiteness of Z, S, Y.
  void validate() const;
};

/// Seeded uniform [0,1) graph with zero diagonal, rows scaled to sum 1.
/// S starts equal to Z and Y at zero.
GraphState initial_graph_state(Index n, double mu, std::uint64_t seed);

/// S = soft_threshold(Z - Y/mu, alpha/mu), then diag(S) = 0 and S = max(S, 0).
GraphState update_S(GraphState state, double alpha);

/// Y += mu (S - Z).
GraphState update_Y(GraphState state);

/// ||S - Z||_F / max(1, ||Z||_F).
double alm_residual(const GraphState& state);

/// d_ij = ||P(i,:) - P(j,:)||^2 (OpenMP kernel).
Matrix pairwise_row_distances(const Matrix& P);

/// Right-hand sides 2K + mu*E - (beta/2)*D with E = S + Y/mu, one column per
/// graph column.
Matrix z_update_rhs(const GraphState& state, const Matrix& K, const Matrix& D, double beta);

/// Column-wise Z solver for a fixed (K, mu). Factors mu*I + 2K once; each
/// column of Z then solves (mu*I + 2K) z_i = 2K(:,i) + mu*E(:,i) - (beta/2)d_i.
/// The inverse is formed from the factor once and applied to column blocks.
class ZUpdater {
 public:
  ZUpdater(const Matrix& K, double mu);

  double mu() const { return mu_; }
  Index n() const { return factor_->size(); }
  const SpdFactorization& factorization() const { return *factor_; }

  /// Column solves fan out over OpenMP workers. When `KZ` is given it
  /// receives K*Z, read off the solved system as (B - mu*Z)/2.
  GraphState operator()(GraphState state, const Matrix& P, double beta,
                        Matrix* KZ = nullptr) const;

  /// Same update through the serial reference kernel.
  GraphState serial(GraphState state, const Matrix& P, double beta) const;

 private:
  Matrix K_;
  double mu_;
  std::shared_ptr<const SpdFactorization> factor_;
  std::shared_ptr<const Matrix> inverse_;
};

/// One-shot Z update: factors mu*I + 2K and solves every column.
GraphState update_Z(GraphState state, const KernelMatrix& K, const Matrix& P, double beta);

/// Objective of the per-column quadratic, summed over columns:
/// sum_i z_i^T (mu/2 I + K) z_i + ((beta/2) d_i - mu E_i - 2K(:,i))^T z_i.
double z_subproblem_objective(const Matrix& Z, const GraphState& state, const Matrix& K,
                              const Matrix& D, double beta);

}  // namespace unispec
