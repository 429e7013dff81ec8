#include "unispec/solvers.hpp"

#include "unispec/errors.hpp"
#include "unispec/parallel_ops.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace unispec {

void StiefelStats::absorb(const StiefelReport& r) {
  ++calls;
  accepted_steps += r.iterations;
  if (!r.monotone) ++descent_violations;
  reorthonormalizations += r.reorthonormalizations;
  max_feasibility_error = std::max(max_feasibility_error, r.max_feasibility_error);
}

double kernel_alignment_cost(const Matrix& K, const Matrix& Z) {
  if (K.rows() != K.cols() || Z.rows() != K.rows() || Z.cols() != K.cols())
    throw InvalidArgument("kernel_alignment_cost: K and Z must be n x n");
  const Matrix KZ = K * Z;
  return K.trace() - 2.0 * KZ.trace() + (Z.array() * KZ.array()).sum();
}

double unified_objective(const Matrix& K, const Matrix& Z, const Matrix& P, const Matrix& Q,
                         const Matrix& F, const HyperParams& params) {
  const Laplacian L = build_laplacian(Z);
  return kernel_alignment_cost(K, Z) + params.alpha * Z.cwiseAbs().sum() +
         embedding_objective(L, F, Q, P, params.beta, params.gamma);
}

WeightVector update_weights(std::span<const double> h) {
  if (h.empty()) throw InvalidArgument("update_weights: empty cost vector");
  std::vector<double> floored(h.begin(), h.end());
  for (double& v : floored) {
    if (std::isnan(v)) throw InvalidArgument("update_weights: NaN cost");
    v = std::max(v, kAlignmentFloor);
  }
  WeightVector out;
  out.w.resize(floored.size());
  for (std::size_t i = 0; i < floored.size(); ++i) {
    double s = 0.0;
    for (double hj : floored) s += floored[i] / hj;
    out.w[i] = 1.0 / (s * s);
  }
  return out;
}

// UnifiedIteration ------------------------------------------------------------

UnifiedIteration::UnifiedIteration(Index n, const HyperParams& params) : params_(params) {
  params_.validate(n);
  const Index c = params_.clusters;
  graph_ = initial_graph_state(n, params_.mu, params_.seed);
  F_.F = Matrix::Zero(n, c);
  Q_ = params_.rotation_init == RotationInit::identity
           ? Rotation{Matrix::Identity(c, c)}
           : random_rotation(c, params_.seed ^ 0x51u);
  P_ = init_P(build_laplacian(graph_.Z), c, params_.seed ^ 0x9e3779b97f4a7c15ull, params_.init);
}

void UnifiedIteration::set_kernel(const Matrix& K) {
  require_shape(K, graph_.n(), graph_.n(), "unified solver kernel");
  K_ = K;
  zsolve_.reset();
}

UnifiedIteration::Step UnifiedIteration::step() {
  if (K_.size() == 0) throw InvalidArgument("UnifiedIteration: no kernel set");
  if (!zsolve_ || zsolve_->mu() != graph_.mu) zsolve_.emplace(K_, graph_.mu);

  graph_ = update_S(std::move(graph_), params_.alpha);
  Matrix KZ;
  graph_ = (*zsolve_)(std::move(graph_), P_.P, params_.beta, &KZ);
  graph_ = update_Y(std::move(graph_));

  const Laplacian L = build_laplacian(graph_.Z);
  StiefelResult moved = update_P(L, F_, Q_, params_.beta, params_.gamma, P_);
  stiefel_.absorb(moved.report);
  P_ = std::move(moved.P);
  Q_ = update_Q(F_, P_);
  IndicatorMatrix F = update_F(P_, Q_);

  Step out;
  out.labels_changed = F.F != F_.F;
  F_ = std::move(F);
  out.residual = alm_residual(graph_);
  const double alignment =
      K_.trace() - 2.0 * KZ.trace() + (graph_.Z.array() * KZ.array()).sum();
  out.objective = alignment + params_.alpha * graph_.Z.cwiseAbs().sum() +
                  embedding_objective(L, F_.F, Q_.Q, P_.P, params_.beta, params_.gamma);
  if (!std::isfinite(out.residual) || !std::isfinite(out.objective))
    throw SolverError("non-finite iterate in the alternating updates");
  if (params_.rho > 1.0) graph_.mu = std::min(params_.rho * graph_.mu, params_.mu_max);
  return out;
}

// Solvers ---------------------------------------------------------------------

namespace {

void check_kernel(const Matrix& K, const char* who) {
  if (K.rows() != K.cols() || K.rows() < 2)
    throw InvalidArgument(fmt::format("{}: kernel must be square with n >= 2", who));
  require_finite(K, who);
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if (symmetry_violation(K) > kSymmetryTolerance * scale)
    throw DataError(fmt::format("{}: kernel is not symmetric", who));
}

void finish(SolveResult& result, const UnifiedIteration& it) {
  result.Z = it.graph().Z;
  result.S = it.graph().S;
  result.P = it.embedding();
  result.Q = it.rotation();
  result.F = it.indicator();
  result.stiefel = it.stiefel();
  LabelVector lv = labels_of(result.F);
  result.labels = std::move(lv.labels);
  result.empty_clusters = std::move(lv.empty_clusters);
  if (!result.empty_clusters.empty()) {
    result.warnings.push_back(
        fmt::format("run ended with {} empty cluster(s)", result.empty_clusters.size()));
  }
  if (!result.converged) {
    result.warnings.push_back(
        fmt::format("stopping criterion not met within {} outer iterations", result.iterations));
  }
}

}  // namespace

SolveResult scsk(const KernelMatrix& K, const HyperParams& params) {
  check_kernel(K.K, "scsk");
  UnifiedIteration it(K.n(), params);
  it.set_kernel(K.K);

  SolveResult result;
  for (int outer = 0; outer < params.max_outer; ++outer) {
    const auto step = it.step();
    result.objective_trace.push_back(step.objective);
    result.residual_trace.push_back(step.residual);
    result.iterations = outer + 1;
    if (step.residual <= params.tol && !step.labels_changed) {
      result.converged = true;
      break;
    }
  }
  finish(result, it);
  return result;
}

SolveResult scmk(const KernelBank& bank, const HyperParams& params) {
  bank.validate();
  for (const auto& k : bank.kernels) check_kernel(k.K, "scmk");
  const std::size_t r = bank.size();
  UnifiedIteration it(bank.n(), params);

  // Literal start w_i = 1/r; feasible (sum sqrt w = 1) only after the first update.
  std::vector<double> w(r, 1.0 / static_cast<double>(r));
  std::vector<double> h(r);

  SolveResult result;
  for (int outer = 0; outer < params.max_outer; ++outer) {
    it.set_kernel(combine_raw(bank, w).K);
    const auto step = it.step();

    const Matrix& Z = it.graph().Z;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < r; ++i) h[i] = kernel_alignment_cost(bank.kernels[i].K, Z);
    WeightVector next = update_weights(h);

    double dw = 0.0;
    for (std::size_t i = 0; i < r; ++i) dw = std::max(dw, std::abs(next.w[i] - w[i]));
    w = next.w;
    result.weight_trace.push_back(w);
    result.objective_trace.push_back(step.objective);
    result.residual_trace.push_back(step.residual);
    result.iterations = outer + 1;
    if (step.residual <= params.tol && !step.labels_changed && dw <= params.tol) {
      result.converged = true;
      break;
    }
  }
  result.weights = WeightVector{w};
  finish(result, it);
  return result;
}

SolveResult tsep(const KernelMatrix& K, const HyperParams& params) {
  check_kernel(K.K, "tsep");
  const Index n = K.n();
  params.validate(n);
  const Index c = params.clusters;

  // Step 1: graph learning alone (no spectral coupling).
  GraphState state = initial_graph_state(n, params.mu, params.seed);
  std::optional<ZUpdater> zsolve;
  const Matrix no_embedding = Matrix::Zero(n, c);
  SolveResult result;
  for (int outer = 0; outer < params.max_outer; ++outer) {
    if (!zsolve || zsolve->mu() != state.mu) zsolve.emplace(K.K, state.mu);
    state = update_S(std::move(state), params.alpha);
    state = (*zsolve)(std::move(state), no_embedding, 0.0);
    state = update_Y(std::move(state));
    const double residual = alm_residual(state);
    result.residual_trace.push_back(residual);
    result.objective_trace.push_back(kernel_alignment_cost(K.K, state.Z) +
                                     params.alpha * state.Z.cwiseAbs().sum());
    result.iterations = outer + 1;
    if (params.rho > 1.0) state.mu = std::min(params.rho * state.mu, params.mu_max);
    if (residual <= params.tol) {
      result.converged = true;
      break;
    }
  }

  // Step 2: spectral embedding of the learned graph.
  const Laplacian L = build_laplacian(state.Z);
  result.P = Embedding{sym_eig_smallest(L.L, c).eigenvectors};

  // Step 3: k-means on the embedding rows.
  const KMeansResult km = kmeans(result.P.P, c, 20, params.seed);
  result.Z = std::move(state.Z);
  result.S = std::move(state.S);
  result.F = indicator_from_labels(km.labels, c);
  result.Q = Rotation{Matrix::Identity(c, c)};
  LabelVector lv = labels_of(result.F);
  result.labels = std::move(lv.labels);
  result.empty_clusters = std::move(lv.empty_clusters);
  if (!result.empty_clusters.empty())
    result.warnings.push_back(
        fmt::format("run ended with {} empty cluster(s)", result.empty_clusters.size()));
  if (!result.converged)
    result.warnings.push_back(fmt::format(
        "graph learning did not reach tol within {} iterations", result.iterations));
  return result;
}

// k-means ---------------------------------------------------------------------

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Index uniform_index(std::mt19937_64& rng, Index n) {
  return std::min<Index>(static_cast<Index>(uniform01(rng) * static_cast<double>(n)), n - 1);
}

Matrix plus_plus_centers(const Matrix& X, Index c, std::mt19937_64& rng) {
  const Index n = X.rows();
  Matrix centers(c, X.cols());
  centers.row(0) = X.row(uniform_index(rng, n));
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (X.row(i) - centers.row(0)).squaredNorm();
  for (Index k = 1; k < c; ++k) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, n);
    }
    centers.row(k) = X.row(pick);
    for (Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (X.row(i) - centers.row(k)).squaredNorm());
  }
  return centers;
}

struct LloydRun {
  std::vector<int> labels;
  double wcss = 0.0;
  long repairs = 0;
  int iterations = 0;
};

LloydRun lloyd(const Matrix& X, Matrix centers, int max_iterations) {
  const Index n = X.rows();
  const Index c = centers.rows();
  LloydRun run;
  std::vector<int> labels;
  std::vector<double> dist;
  for (int iter = 0; iter < max_iterations; ++iter) {
    Assignment a = par::assign_nearest(X, centers, labels);
    labels = std::move(a.labels);
    dist = std::move(a.distances);
    run.iterations = iter + 1;

    std::vector<long> counts(c, 0);
    for (int l : labels) ++counts[l];
    bool repaired = false;
    for (Index k = 0; k < c; ++k) {
      if (counts[k] > 0) continue;
      // Farthest point from its center, taken from a cluster that can spare it.
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[labels[i]] < 2) continue;
        if (far < 0 || dist[i] > dist[far]) far = i;
      }
      if (far < 0) break;
      --counts[labels[far]];
      labels[far] = static_cast<int>(k);
      ++counts[k];
      dist[far] = 0.0;
      ++run.repairs;
      repaired = true;
    }

    Matrix next = Matrix::Zero(c, X.cols());
    for (Index i = 0; i < n; ++i) next.row(labels[i]) += X.row(i);
    for (Index k = 0; k < c; ++k)
      next.row(k) = counts[k] > 0 ? Eigen::RowVectorXd(next.row(k) / double(counts[k]))
                                  : Eigen::RowVectorXd(centers.row(k));
    centers = std::move(next);
    if (iter > 0 && a.changed == 0 && !repaired) break;
  }
  run.wcss = 0.0;
  for (Index i = 0; i < n; ++i) run.wcss += (X.row(i) - centers.row(labels[i])).squaredNorm();
  run.labels = std::move(labels);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, Index c, int restarts, std::uint64_t seed,
                    int max_iterations) {
  const Index n = points.rows();
  if (n < 1 || points.cols() < 1) throw InvalidArgument("kmeans: empty point set");
  if (c < 1 || c > n)
    throw InvalidArgument(fmt::format("kmeans: cluster count {} outside [1, n = {}]", c, n));
  if (restarts < 1) throw InvalidArgument("kmeans: restarts must be >= 1");
  require_finite(points, "kmeans");

  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(sequence);
    LloydRun run = lloyd(points, plus_plus_centers(points, c, rng), max_iterations);
    best.empty_cluster_repairs += run.repairs;
    if (run.wcss < best.wcss) {
      best.wcss = run.wcss;
      best.labels = std::move(run.labels);
      best.iterations = run.iterations;
    }
  }
  return best;
}

}  // namespace unispec
