#pragma once

#include "unispec/discrete_labels.hpp"
#include "unispec/graph_learner.hpp"
#include "unispec/kernel_bank.hpp"
#include "unispec/spectral_embed.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace unispec {

/// Aggregated update_P diagnostics over a whole solve.
struct StiefelStats {
  long calls = 0;
  long accepted_steps = 0;
  long descent_violations = 0;  // accepted steps that raised the objective
  long reorthonormalizations = 0;
  double max_feasibility_error = 0.0;

  void absorb(const StiefelReport& r);
};

struct SolveResult {
  std::vector<int> labels;
  IndicatorMatrix F;
  Matrix Z;
  Matrix S;  // split copy of Z at the last iterate
  Embedding P;
  Rotation Q;
  std::optional<WeightVector> weights;            // multiple-kernel solver only
  std::vector<std::vector<double>> weight_trace;  // w after every weight update
  std::vector<double> objective_trace;
  std::vector<double> residual_trace;
  int iterations = 0;
  bool converged = false;
  std::vector<int> empty_clusters;
  std::vector<std::string> warnings;
  StiefelStats stiefel;
};

/// h = Tr(K - 2KZ + Z^T K Z), i.e. Tr((I - Z)^T K (I - Z)).
double kernel_alignment_cost(const Matrix& K, const Matrix& Z);

/// Full single-kernel objective at (Z, P, Q, F):
/// h(K, Z) + alpha ||Z||_1 + beta Tr(P^T L P) + gamma ||F - P Q||_F^2.
double unified_objective(const Matrix& K, const Matrix& Z, const Matrix& P, const Matrix& Q,
                         const Matrix& F, const HyperParams& params);

// Floor applied to every h_i before the weight update.
inline constexpr double kAlignmentFloor = 1e-12;

/// w_i = (h_i * sum_j 1/h_j)^{-2}, evaluated as (sum_j h_i/h_j)^{-2} so that
/// equal costs give exactly 1/r^2. The result satisfies sum_i sqrt(w_i) = 1.
WeightVector update_weights(std::span<const double> h);

/// State of the alternating scheme for one kernel: ALM triple, P, Q, F.
/// Each step() performs one pass of S -> Z -> Y -> P -> Q -> F.
class UnifiedIteration {
 public:
  UnifiedIteration(Index n, const HyperParams& params);

  /// Kernel used by the following steps. Must be n x n and PSD.
  void set_kernel(const Matrix& K);

  struct Step {
    double residual = 0.0;
    double objective = 0.0;
    bool labels_changed = true;
  };

  Step step();

  const GraphState& graph() const { return graph_; }
  const Embedding& embedding() const { return P_; }
  const Rotation& rotation() const { return Q_; }
  const IndicatorMatrix& indicator() const { return F_; }
  const StiefelStats& stiefel() const { return stiefel_; }
  const HyperParams& params() const { return params_; }

 private:
  HyperParams params_;
  Matrix K_;
  std::optional<ZUpdater> zsolve_;
  GraphState graph_;
  Embedding P_;
  Rotation Q_;
  IndicatorMatrix F_;
  StiefelStats stiefel_;
};

/// Single-kernel unified solver.
SolveResult scsk(const KernelMatrix& K, const HyperParams& params);

/// Multiple-kernel solver; w starts at 1/r and is refreshed after every pass.
SolveResult scmk(const KernelBank& bank, const HyperParams& params);

/// Three separate steps: graph learning without spectral coupling, spectral
/// embedding, k-means on the embedding rows (20 restarts).
SolveResult tsep(const KernelMatrix& K, const HyperParams& params);

struct KMeansResult {
  std::vector<int> labels;
  double wcss = 0.0;
  long empty_cluster_repairs = 0;  // summed over restarts
  int iterations = 0;              // Lloyd iterations of the winning restart
};

/// Lloyd's algorithm with k-means++ seeding over the rows of `points`
/// (one sample per row). Returns the restart with the lowest within-cluster
/// sum of squares. An empty cluster takes over the point farthest from its
/// center.
KMeansResult kmeans(const Matrix& points, Index c, int restarts = 20, std::uint64_t seed = 0,
                    int max_iterations = 300);

}  // namespace unispec
