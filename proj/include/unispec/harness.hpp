#pragma once

#include "unispec/datasets.hpp"
#include "unispec/graph_learner.hpp"
#include "unispec/kernel_bank.hpp"
#include "unispec/metrics.hpp"
#include "unispec/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unispec {

enum class SolverKind { scsk, scmk, tsep };

SolverKind parse_solver(std::string_view name);
std::string_view solver_name(SolverKind kind);

/// Kernel selection as written on the command line:
///   "linear", "gaussian:1", "poly:1:2"  a single kernel
///   "gaussian:1,linear,..."             an explicit bank
///   "bank"                              the standard 12-kernel bank
///   "cache:<file>"                      a kernel cache file
struct KernelSelection {
  std::vector<KernelSpec> specs;
  bool standard_bank = false;
  std::optional<std::filesystem::path> cache;

  static KernelSelection parse(const std::string& text);
  std::string to_string() const;
};

/// Hyperparameter lists; an empty list means "use the single value from the
/// base HyperParams". The grid is the Cartesian product, enumerated
/// lexicographically (alpha outermost, then beta, gamma, mu).
struct Grid {
  std::vector<double> alpha, beta, gamma, mu;
};

/// alpha, beta in {1e-4, ..., 1e2} and gamma in {1e-5, 1e-4, 1e-3}.
Grid default_grid();

struct RunConfig {
  SolverKind solver = SolverKind::scsk;
  std::string kernel = "linear";
  HyperParams params;
  Grid grid;
  NmiNormalization nmi = NmiNormalization::sqrt;
  bool parallel_grid = true;
};

struct RunRecord {
  std::size_t index = 0;
  HyperParams params;
  bool ok = false;
  std::string error;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double objective = 0.0;
  std::optional<double> accuracy, nmi, purity;
  std::size_t empty_clusters = 0;
  std::vector<double> weights;
  std::vector<int> labels;
  StiefelStats stiefel;  // update_P diagnostics (empty for tsep)
};

struct MetricSummary {
  std::optional<double> best, mean;
};

struct Report {
  std::string solver;
  std::string kernel;
  std::string dataset;
  Index samples = 0;
  Index features = 0;
  Index clusters = 0;
  std::vector<RunRecord> records;  // sorted by grid index
  MetricSummary accuracy, nmi, purity;
  std::size_t failed = 0;
};

/// Every grid point of the configuration as full HyperParams, in order.
std::vector<HyperParams> expand_grid(const HyperParams& base, const Grid& grid);

/// Builds the kernel(s) once, runs the solver at every grid point (in
/// parallel when allowed; records stay in grid order) and scores each run
/// against the truth labels when the dataset has them. Failures at one grid
/// point are recorded and the run continues.
Report run(const RunConfig& config, const Dataset& data);

/// Text report: a summary block followed by one key=value line per record.
/// The timestamp is confined to the single "generated_at=" line.
std::string format_report(const Report& report, std::string_view timestamp);

/// The same records as CSV with a header row.
std::string records_csv(const Report& report);

}  // namespace unispec
