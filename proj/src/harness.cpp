#include "unispec/harness.hpp"

#include "unispec/errors.hpp"
#include "unispec/solvers.hpp"

#include <fmt/core.h>
#include <fmt/format.h>

#include <algorithm>
#include <sstream>

namespace unispec {

SolverKind parse_solver(std::string_view name) {
  if (name == "scsk") return SolverKind::scsk;
  if (name == "scmk") return SolverKind::scmk;
  if (name == "tsep") return SolverKind::tsep;
  throw InvalidArgument(fmt::format("unknown solver '{}' (expected scsk, scmk or tsep)", name));
}

std::string_view solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::scsk:
      return "scsk";
    case SolverKind::scmk:
      return "scmk";
    case SolverKind::tsep:
      return "tsep";
  }
  return "?";
}

KernelSelection KernelSelection::parse(const std::string& text) {
  KernelSelection sel;
  if (text == "bank") {
    sel.standard_bank = true;
    return sel;
  }
  if (text.rfind("cache:", 0) == 0) {
    sel.cache = text.substr(6);
    if (sel.cache->empty()) throw InvalidArgument("kernel selection 'cache:' needs a file path");
    return sel;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) sel.specs.push_back(KernelSpec::parse(item));
  if (sel.specs.empty()) throw InvalidArgument("empty kernel selection");
  return sel;
}

std::string KernelSelection::to_string() const {
  if (standard_bank) return "bank";
  if (cache) return "cache:" + cache->string();
  std::vector<std::string> parts;
  for (const auto& s : specs) parts.push_back(s.to_string());
  return fmt::format("{}", fmt::join(parts, ","));
}

Grid default_grid() {
  Grid g;
  g.alpha = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  g.beta = g.alpha;
  g.gamma = {1e-5, 1e-4, 1e-3};
  return g;
}

std::vector<HyperParams> expand_grid(const HyperParams& base, const Grid& grid) {
  auto values = [](const std::vector<double>& list, double fallback) {
    return list.empty() ? std::vector<double>{fallback} : list;
  };
  const auto alphas = values(grid.alpha, base.alpha);
  const auto betas = values(grid.beta, base.beta);
  const auto gammas = values(grid.gamma, base.gamma);
  const auto mus = values(grid.mu, base.mu);
  std::vector<HyperParams> points;
  for (double a : alphas)
    for (double b : betas)
      for (double g : gammas)
        for (double m : mus) {
          HyperParams p = base;
          p.alpha = a;
          p.beta = b;
          p.gamma = g;
          p.mu = m;
          p.mu_max = std::max(p.mu_max, m);
          points.push_back(p);
        }
  return points;
}

namespace {

KernelBank build_kernels(const KernelSelection& sel, const Dataset& data) {
  if (sel.cache) {
    KernelBank bank;
    bank.kernels.push_back(cache_read(*sel.cache));
    if (bank.n() != data.samples()) {
      throw DataError(fmt::format("kernel cache {} has n = {} but the dataset has {} samples",
                                  sel.cache->string(), bank.n(), data.samples()));
    }
    return bank;
  }
  if (sel.standard_bank) return standard_bank(data.X);
  return make_bank(data.X, sel.specs);
}

MetricSummary summarize(const std::vector<RunRecord>& records,
                        std::optional<double> RunRecord::*field) {
  MetricSummary s;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (!r.ok || !(r.*field)) continue;
    const double v = *(r.*field);
    s.best = s.best ? std::max(*s.best, v) : v;
    sum += v;
    ++count;
  }
  if (count) s.mean = sum / static_cast<double>(count);
  return s;
}

RunRecord solve_point(SolverKind solver, const KernelBank& bank, const HyperParams& params,
                      const Dataset& data, NmiNormalization norm) {
  RunRecord rec;
  rec.params = params;
  SolveResult result;
  switch (solver) {
    case SolverKind::scsk:
      result = scsk(bank.kernels.front(), params);
      break;
    case SolverKind::tsep:
      result = tsep(bank.kernels.front(), params);
      break;
    case SolverKind::scmk:
      result = scmk(bank, params);
      break;
  }
  rec.ok = true;
  rec.iterations = result.iterations;
  rec.converged = result.converged;
  rec.residual = result.residual_trace.empty() ? 0.0 : result.residual_trace.back();
  rec.objective = result.objective_trace.empty() ? 0.0 : result.objective_trace.back();
  rec.empty_clusters = result.empty_clusters.size();
  rec.stiefel = result.stiefel;
  if (result.weights) rec.weights = result.weights->w;
  if (data.truth) {
    rec.accuracy = accuracy(result.labels, *data.truth);
    rec.nmi = nmi(result.labels, *data.truth, norm);
    rec.purity = purity(result.labels, *data.truth);
  }
  rec.labels = std::move(result.labels);
  return rec;
}

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "na"; }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += (ch == '\n' || ch == '\r') ? ' ' : ch;
  }
  return out + "\"";
}

std::string weights_text(const std::vector<double>& w) {
  if (w.empty()) return "-";
  std::vector<std::string> parts;
  for (double v : w) parts.push_back(num(v));
  return fmt::format("{}", fmt::join(parts, "/"));
}

}  // namespace

Report run(const RunConfig& config, const Dataset& data) {
  data.validate();
  const KernelSelection sel = KernelSelection::parse(config.kernel);
  const KernelBank bank = build_kernels(sel, data);
  if (config.solver != SolverKind::scmk && bank.size() != 1) {
    throw InvalidArgument(fmt::format("solver {} takes a single kernel, got {}",
                                      solver_name(config.solver), bank.size()));
  }

  const auto points = expand_grid(config.params, config.grid);
  for (const auto& p : points) p.validate(data.samples());

  Report report;
  report.solver = std::string(solver_name(config.solver));
  report.kernel = sel.to_string();
  report.dataset = data.name;
  report.samples = data.samples();
  report.features = data.features();
  report.clusters = config.params.clusters;
  report.records.resize(points.size());

  const long count = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel_grid)
  for (long i = 0; i < count; ++i) {
    RunRecord rec;
    try {
      rec = solve_point(config.solver, bank, points[i], data, config.nmi);
    } catch (const std::exception& e) {
      rec = RunRecord{};
      rec.params = points[i];
      rec.ok = false;
      rec.error = e.what();
    }
    rec.index = static_cast<std::size_t>(i);
    report.records[i] = std::move(rec);
  }

  for (const auto& r : report.records)
    if (!r.ok) ++report.failed;
  report.accuracy = summarize(report.records, &RunRecord::accuracy);
  report.nmi = summarize(report.records, &RunRecord::nmi);
  report.purity = summarize(report.records, &RunRecord::purity);
  return report;
}

std::string format_report(const Report& report, std::string_view timestamp) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("# unispec run report");
  line(fmt::format("generated_at={}", timestamp));
  line(fmt::format("solver={} kernel={} dataset={} samples={} features={} clusters={} "
                   "grid_points={} failed={}",
                   report.solver, report.kernel, quoted(report.dataset), report.samples,
                   report.features, report.clusters, report.records.size(), report.failed));
  line(fmt::format("best accuracy={} nmi={} purity={}", opt_num(report.accuracy.best),
                   opt_num(report.nmi.best), opt_num(report.purity.best)));
  line(fmt::format("mean accuracy={} nmi={} purity={}", opt_num(report.accuracy.mean),
                   opt_num(report.nmi.mean), opt_num(report.purity.mean)));
  for (const auto& r : report.records) {
    const auto& p = r.params;
    std::string rec = fmt::format(
        "record index={} alpha={} beta={} gamma={} mu={} rho={} seed={} status={} "
        "iterations={} converged={} residual={} objective={} accuracy={} nmi={} purity={} "
        "empty_clusters={} weights={}",
        r.index, num(p.alpha), num(p.beta), num(p.gamma), num(p.mu), num(p.rho), p.seed,
        r.ok ? "ok" : "error", r.iterations, r.converged ? "true" : "false", num(r.residual),
        num(r.objective), opt_num(r.accuracy), opt_num(r.nmi), opt_num(r.purity),
        r.empty_clusters, weights_text(r.weights));
    if (!r.ok) rec += " error=" + quoted(r.error);
    line(rec);
  }
  return out;
}

std::string records_csv(const Report& report) {
  std::string out =
      "index,alpha,beta,gamma,mu,rho,seed,status,iterations,converged,residual,objective,"
      "accuracy,nmi,purity,empty_clusters,weights,error\n";
  for (const auto& r : report.records) {
    const auto& p = r.params;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.index,
                       num(p.alpha), num(p.beta), num(p.gamma), num(p.mu), num(p.rho), p.seed,
                       r.ok ? "ok" : "error", r.iterations, r.converged ? "true" : "false",
                       num(r.residual), num(r.objective), opt_num(r.accuracy), opt_num(r.nmi),
                       opt_num(r.purity), r.empty_clusters, weights_text(r.weights),
                       r.ok ? "" : quoted(r.error));
  }
  return out;
}

}  // namespace unispec
