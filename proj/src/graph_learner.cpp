#include "unispec/graph_learner.hpp"

#include "unispec/errors.hpp"
#include "unispec/parallel_ops.hpp"

#include <fmt/core.h>

#include <cmath>
#include <random>

namespace unispec {

void HyperParams::validate(Index n) const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0))
      throw InvalidArgument(fmt::format("{} must be a positive finite number, got {}", name, v));
  };
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(gamma, "gamma");
  positive(mu, "mu");
  positive(tol, "tol");
  if (!(rho >= 1.0)) throw InvalidArgument(fmt::format("rho must be >= 1, got {}", rho));
  if (!(mu_max >= mu)) throw InvalidArgument("mu_max must be >= mu");
  if (max_outer < 1) throw InvalidArgument("max_outer must be >= 1");
  if (clusters < 2 || clusters > n) {
    throw InvalidArgument(
        fmt::format("cluster count {} must satisfy 2 <= c <= n = {}", clusters, n));
  }
}

void GraphState::check_shape() const {
  const Index n = Z.rows();
  if (n < 1 || Z.cols() != n || S.rows() != n || S.cols() != n || Y.rows() != n || Y.cols() != n)
    throw InvalidArgument("graph state: Z, S, Y must be n x n with a common n");
  if (!(mu > 0.0 && std::isfinite(mu))) throw InvalidArgument("graph state: mu must be positive");
}

void GraphState::validate() const {
  check_shape();
  require_finite(Z, "graph state Z");
  require_finite(S, "graph state S");
  require_finite(Y, "graph state Y");
}

GraphState initial_graph_state(Index n, double mu, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("initial_graph_state: need n >= 2");
  std::mt19937_64 rng(seed);
  GraphState state;
  state.Z.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      // 53-bit uniform in [0,1), portable across standard libraries.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      state.Z(i, j) = (i == j) ? 0.0 : u;
      row += state.Z(i, j);
    }
    if (row > 0.0) state.Z.row(i) /= row;
  }
  state.S = state.Z;
  state.Y = Matrix::Zero(n, n);
  state.mu = mu;
  return state;
}

GraphState update_S(GraphState state, double alpha) {
  state.check_shape();
  if (!(alpha > 0.0)) throw InvalidArgument("update_S: alpha must be positive");
  const double threshold = alpha / state.mu;
  const Index n = state.n();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double h = state.Z(i, j) - state.Y(i, j) / state.mu;
      const double shrunk = std::max(std::abs(h) - threshold, 0.0);
      const double s = h > 0.0 ? shrunk : (h < 0.0 ? -shrunk : 0.0);
      // zero diagonal, then clamp negatives
      state.S(i, j) = (i == j) ? 0.0 : std::max(s, 0.0);
    }
  }
  return state;
}

GraphState update_Y(GraphState state) {
  state.check_shape();
  state.Y += state.mu * (state.S - state.Z);
  return state;
}

double alm_residual(const GraphState& state) {
  return (state.S - state.Z).norm() / std::max(1.0, state.Z.norm());
}

Matrix pairwise_row_distances(const Matrix& P) {
  require_finite(P, "pairwise_row_distances");
  return par::row_squared_distances(P);
}

Matrix z_update_rhs(const GraphState& state, const Matrix& K, const Matrix& D, double beta) {
  // 2K + mu*(S + Y/mu) - (beta/2) D
  Matrix B = 2.0 * K;
  B += state.mu * state.S + state.Y;
  B -= (0.5 * beta) * D;
  return B;
}

ZUpdater::ZUpdater(const Matrix& K, double mu) : K_(K), mu_(mu) {
  if (!(mu > 0.0)) throw InvalidArgument("ZUpdater: mu must be positive");
  Matrix A = 2.0 * K;
  A.diagonal().array() += mu;
  factor_ = std::make_shared<const SpdFactorization>(A);
  inverse_ = std::make_shared<const Matrix>(factor_->inverse());
}

namespace {

void check_z_inputs(const GraphState& state, Index n, const Matrix& P, double beta, double mu) {
  state.check_shape();
  if (state.n() != n) throw InvalidArgument("update_Z: state and kernel sizes differ");
  if (P.rows() != n) throw InvalidArgument("update_Z: embedding row count differs from n");
  if (!(beta >= 0.0)) throw InvalidArgument("update_Z: beta must be nonnegative");
  if (state.mu != mu) throw InvalidArgument("update_Z: factorization was built for another mu");
}

}  // namespace

GraphState ZUpdater::operator()(GraphState state, const Matrix& P, double beta,
                                 Matrix* KZ) const {
  check_z_inputs(state, n(), P, beta, mu_);
  const Matrix D = beta == 0.0 ? Matrix::Zero(n(), n()) : par::row_squared_distances(P);
  const Matrix B = z_update_rhs(state, K_, D, beta);
  state.Z = par::multiply_columns(*inverse_, B);
  if (KZ) *KZ = 0.5 * (B - mu_ * state.Z);
  return state;
}

GraphState ZUpdater::serial(GraphState state, const Matrix& P, double beta) const {
  check_z_inputs(state, n(), P, beta, mu_);
  const Matrix D = beta == 0.0 ? Matrix::Zero(n(), n()) : serial::row_squared_distances(P);
  state.Z = serial::multiply_columns(*inverse_, z_update_rhs(state, K_, D, beta));
  return state;
}

GraphState update_Z(GraphState state, const KernelMatrix& K, const Matrix& P, double beta) {
  const ZUpdater solve(K.K, state.mu);
  return solve(std::move(state), P, beta);
}

double z_subproblem_objective(const Matrix& Z, const GraphState& state, const Matrix& K,
                              const Matrix& D, double beta) {
  const Matrix E = state.S + state.Y / state.mu;
  const Matrix KZ = K * Z;
  double total = 0.0;
  for (Index i = 0; i < Z.cols(); ++i) {
    const auto z = Z.col(i);
    const double quad = 0.5 * state.mu * z.squaredNorm() + z.dot(KZ.col(i));
    const double lin = (0.5 * beta * D.col(i) - state.mu * E.col(i) - 2.0 * K.col(i)).dot(z);
    total += quad + lin;
  }
  return total;
}

}  // namespace unispec
