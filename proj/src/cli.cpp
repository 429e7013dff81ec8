#include "unispec/cli.hpp"

#include "unispec/datasets.hpp"
#include "unispec/errors.hpp"
#include "unispec/harness.hpp"
#include "unispec/kernel_bank.hpp"
#include "unispec/metrics.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

namespace unispec {

namespace {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void write_dataset(const Dataset& data, const fs::path& dir, std::ostream& out) {
  fs::create_directories(dir);
  write_csv(data, dir / "features.csv");
  if (data.truth) write_labels(*data.truth, dir / "labels.txt");
  fmt::print(out, "wrote {} samples x {} features to {}\n", data.samples(), data.features(),
             (dir / "features.csv").string());
}

struct BlobsArgs {
  int clusters = 3;
  int per_cluster = 50;
  int dim = 10;
  double separation = 6.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct RingsArgs {
  int per_ring = 100;
  std::vector<double> radii{1.0, 3.0};
  double noise = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

struct KernelArgs {
  std::string features;
  std::string kernel = "linear";
  std::string out;
  bool raw = false;
  std::string inspect_path;
};

struct RunArgs {
  std::string solver = "scsk";
  std::string kernel;
  double alpha = 1.0, beta = 1.0, gamma = 1e-4, mu = 1.0, rho = 1.0, tol = 1e-4;
  int clusters = 0;
  int max_iter = 100;
  std::uint64_t seed = 0;
  std::vector<double> grid_alpha, grid_beta, grid_gamma, grid_mu;
  bool default_grid = false;
  std::string features, labels, out, init = "spectral", rotation_init = "identity",
                                     nmi = "sqrt", timestamp;
  bool serial_grid = false;
};

struct EvalArgs {
  std::string predicted, truth, nmi = "sqrt";
};

NmiNormalization parse_nmi(const std::string& s) {
  if (s == "sqrt") return NmiNormalization::sqrt;
  if (s == "arithmetic") return NmiNormalization::arithmetic;
  throw InvalidArgument("--nmi must be 'sqrt' or 'arithmetic'");
}

int do_run(const RunArgs& a, std::ostream& out) {
  const Dataset data =
      load_csv(a.features, a.labels.empty() ? std::nullopt : std::optional<fs::path>(a.labels));

  RunConfig cfg;
  cfg.solver = parse_solver(a.solver);
  cfg.kernel = !a.kernel.empty() ? a.kernel : (cfg.solver == SolverKind::scmk ? "bank" : "linear");
  cfg.params.alpha = a.alpha;
  cfg.params.beta = a.beta;
  cfg.params.gamma = a.gamma;
  cfg.params.mu = a.mu;
  cfg.params.rho = a.rho;
  cfg.params.tol = a.tol;
  cfg.params.max_outer = a.max_iter;
  cfg.params.seed = a.seed;
  if (a.init == "spectral") {
    cfg.params.init = InitMode::spectral;
  } else if (a.init == "random") {
    cfg.params.init = InitMode::random;
  } else {
    throw InvalidArgument("--init must be 'spectral' or 'random'");
  }
  if (a.rotation_init == "identity") {
    cfg.params.rotation_init = RotationInit::identity;
  } else if (a.rotation_init == "random") {
    cfg.params.rotation_init = RotationInit::random;
  } else {
    throw InvalidArgument("--rotation-init must be 'identity' or 'random'");
  }
  if (a.clusters > 0) {
    cfg.params.clusters = a.clusters;
  } else if (data.truth) {
    cfg.params.clusters =
        static_cast<Index>(std::set<int>(data.truth->begin(), data.truth->end()).size());
  } else {
    throw InvalidArgument("--clusters is required when no labels file is given");
  }
  if (a.default_grid) cfg.grid = default_grid();
  if (!a.grid_alpha.empty()) cfg.grid.alpha = a.grid_alpha;
  if (!a.grid_beta.empty()) cfg.grid.beta = a.grid_beta;
  if (!a.grid_gamma.empty()) cfg.grid.gamma = a.grid_gamma;
  if (!a.grid_mu.empty()) cfg.grid.mu = a.grid_mu;
  cfg.nmi = parse_nmi(a.nmi);
  cfg.parallel_grid = !a.serial_grid;

  const Report report = run(cfg, data);
  const std::string text = format_report(report, a.timestamp.empty() ? utc_timestamp() : a.timestamp);
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    write_text(dir / "report.txt", text);
    write_text(dir / "records.csv", records_csv(report));
    // labels of the best-accuracy record (first successful one without truth)
    const RunRecord* pick = nullptr;
    for (const auto& r : report.records) {
      if (!r.ok) continue;
      if (!pick || (r.accuracy && pick->accuracy && *r.accuracy > *pick->accuracy)) pick = &r;
    }
    if (pick) write_labels(pick->labels, dir / "labels.txt");
  }
  out << text;
  return report.failed == report.records.size() ? kExitSolver : kExitOk;
}

int do_inspect(const std::string& path, std::ostream& out) {
  const KernelMatrix K = cache_read(path);
  fmt::print(out, "file={}\nn={}\nspec={}\nnormalized={}\n", path, K.n(),
             K.spec ? K.spec->to_string() : "combined", K.normalized ? "true" : "false");
  fmt::print(out, "min_entry={:.10g}\nmax_entry={:.10g}\ntrace={:.10g}\nsymmetry_violation={:.3e}\n",
             K.K.minCoeff(), K.K.maxCoeff(), K.K.trace(), symmetry_violation(K.K));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(K.K, Eigen::EigenvaluesOnly);
  fmt::print(out, "min_eigenvalue={:.6e}\nmax_eigenvalue={:.6e}\n", eig.eigenvalues()(0),
             eig.eigenvalues()(K.n() - 1));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unified spectral clustering with adaptive graph learning in kernel space"};
  app.name("unispec");
  app.require_subcommand(1);

  BlobsArgs blobs;
  auto* gen_blobs_cmd = app.add_subcommand("gen-blobs", "Generate Gaussian blobs with planted labels");
  gen_blobs_cmd->add_option("--clusters", blobs.clusters)->check(CLI::PositiveNumber);
  gen_blobs_cmd->add_option("--per-cluster", blobs.per_cluster)->check(CLI::PositiveNumber);
  gen_blobs_cmd->add_option("--dim", blobs.dim)->check(CLI::PositiveNumber);
  gen_blobs_cmd->add_option("--separation", blobs.separation)->check(CLI::NonNegativeNumber);
  gen_blobs_cmd->add_option("--noise", blobs.noise)->check(CLI::NonNegativeNumber);
  gen_blobs_cmd->add_option("--seed", blobs.seed);
  gen_blobs_cmd->add_option("--out", blobs.out, "Output directory")->required();

  RingsArgs rings;
  auto* gen_rings_cmd = app.add_subcommand("gen-rings", "Generate concentric 2-d rings");
  gen_rings_cmd->add_option("--per-ring", rings.per_ring)->check(CLI::PositiveNumber);
  gen_rings_cmd->add_option("--radii", rings.radii)->delimiter(',');
  gen_rings_cmd->add_option("--noise", rings.noise)->check(CLI::NonNegativeNumber);
  gen_rings_cmd->add_option("--seed", rings.seed);
  gen_rings_cmd->add_option("--out", rings.out, "Output directory")->required();

  KernelArgs kargs;
  auto* kernels_cmd = app.add_subcommand("kernels", "Build or inspect kernel cache files");
  kernels_cmd->require_subcommand(1);
  auto* build_cmd = kernels_cmd->add_subcommand("build", "Build one kernel and write its cache file");
  build_cmd->add_option("--features", kargs.features)->required();
  build_cmd->add_option("--kernel", kargs.kernel, "linear | gaussian:<t> | poly:<a>:<b>");
  build_cmd->add_option("--out", kargs.out, "Cache file to write")->required();
  build_cmd->add_flag("--raw", kargs.raw, "Skip PSD repair and max-entry normalization");
  auto* inspect_cmd = kernels_cmd->add_subcommand("inspect", "Describe a kernel cache file");
  inspect_cmd->add_option("path", kargs.inspect_path)->required();

  RunArgs r;
  auto* run_cmd = app.add_subcommand("run", "Run a solver over a hyperparameter grid");
  run_cmd->add_option("--solver", r.solver, "scsk | scmk | tsep");
  run_cmd->add_option("--kernel", r.kernel,
                      "Kernel spec, comma-separated bank, 'bank' (12 standard kernels) or "
                      "cache:<file>");
  run_cmd->add_option("--alpha", r.alpha);
  run_cmd->add_option("--beta", r.beta);
  run_cmd->add_option("--gamma", r.gamma);
  run_cmd->add_option("--mu", r.mu);
  run_cmd->add_option("--rho", r.rho, "ALM penalty growth factor (1 = fixed mu)");
  run_cmd->add_option("--clusters", r.clusters, "Cluster count (default: distinct labels)");
  run_cmd->add_option("--max-iter", r.max_iter);
  run_cmd->add_option("--tol", r.tol);
  run_cmd->add_option("--seed", r.seed);
  run_cmd->add_option("--grid-alpha", r.grid_alpha)->delimiter(',');
  run_cmd->add_option("--grid-beta", r.grid_beta)->delimiter(',');
  run_cmd->add_option("--grid-gamma", r.grid_gamma)->delimiter(',');
  run_cmd->add_option("--grid-mu", r.grid_mu)->delimiter(',');
  run_cmd->add_flag("--default-grid", r.default_grid,
                    "alpha, beta in 1e-4..1e2 and gamma in 1e-5..1e-3");
  run_cmd->add_option("--features", r.features)->required();
  run_cmd->add_option("--labels", r.labels);
  run_cmd->add_option("--out", r.out, "Directory for report.txt, records.csv, labels.txt");
  run_cmd->add_option("--init", r.init, "spectral | random");
  run_cmd->add_option("--rotation-init", r.rotation_init, "identity | random");
  run_cmd->add_option("--nmi", r.nmi, "sqrt | arithmetic");
  run_cmd->add_option("--timestamp", r.timestamp, "Fixed value for the generated_at line");
  run_cmd->add_flag("--serial-grid", r.serial_grid, "Run grid points one at a time");

  EvalArgs e;
  auto* eval_cmd = app.add_subcommand("eval", "Score a predicted label file against truth");
  eval_cmd->add_option("--predicted", e.predicted)->required();
  eval_cmd->add_option("--truth", e.truth)->required();
  eval_cmd->add_option("--nmi", e.nmi, "sqrt | arithmetic");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_blobs_cmd) {
      write_dataset(gen_blobs(blobs.clusters, blobs.per_cluster, blobs.dim, blobs.separation,
                              blobs.noise, blobs.seed),
                    blobs.out, out);
    } else if (*gen_rings_cmd) {
      write_dataset(gen_rings(rings.per_ring, rings.radii, rings.noise, rings.seed), rings.out, out);
    } else if (*build_cmd) {
      const Dataset data = load_csv(kargs.features);
      const KernelSpec spec = KernelSpec::parse(kargs.kernel);
      const KernelMatrix K = kargs.raw ? build_kernel(data.X, spec) : prepared_kernel(data.X, spec);
      cache_write(K, kargs.out);
      fmt::print(out, "wrote {} kernel (n = {}) to {}\n", spec.to_string(), K.n(), kargs.out);
    } else if (*inspect_cmd) {
      return do_inspect(kargs.inspect_path, out);
    } else if (*run_cmd) {
      return do_run(r, out);
    } else if (*eval_cmd) {
      const auto predicted = load_labels(e.predicted);
      const auto truth = load_labels(e.truth);
      const auto norm = parse_nmi(e.nmi);
      fmt::print(out, "accuracy={:.10g}\nnmi={:.10g}\npurity={:.10g}\n", accuracy(predicted, truth),
                 nmi(predicted, truth, norm), purity(predicted, truth));
    }
  } catch (const InvalidArgument& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return kExitUsage;
  } catch (const DataError& ex) {
    fmt::print(err, "data error: {}\n", ex.what());
    return kExitData;
  } catch (const SolverError& ex) {
    fmt::print(err, "solver error: {}\n", ex.what());
    return kExitSolver;
  } catch (const fs::filesystem_error& ex) {
    fmt::print(err, "data error: {}\n", ex.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace unispec
