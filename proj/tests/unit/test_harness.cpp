#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "unispec/datasets.hpp"
#include "unispec/errors.hpp"
#include "unispec/harness.hpp"

#include <filesystem>
#include <fstream>

using namespace unispec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("unispec_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

RunConfig small_config() {
  RunConfig cfg;
  cfg.params.clusters = 3;
  cfg.params.mu = 100.0;
  cfg.params.alpha = 0.01;
  cfg.params.beta = 0.01;
  cfg.params.max_outer = 30;
  return cfg;
}

}  // namespace

TEST_CASE("gen_blobs construction") {
  const auto d = gen_blobs(3, 50, 10, 6.0, 1.0, 0);
  CHECK(d.samples() == 150);
  CHECK(d.features() == 10);
  REQUIRE(d.truth);
  for (int k = 0; k < 3; ++k) CHECK(std::count(d.truth->begin(), d.truth->end(), k) == 50);
  CHECK(gen_blobs(3, 50, 10, 6.0, 1.0, 0).X == d.X);
  CHECK(gen_blobs(3, 50, 10, 6.0, 1.0, 1).X != d.X);

  const auto same = gen_blobs(3, 5, 2, 0.0, 0.0, 2);
  CHECK(same.X.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gen_blobs centers honor the separation") {
  const auto d = gen_blobs(4, 400, 6, 5.0, 1.0, 3);
  std::vector<Vector> means(4, Vector::Zero(6));
  for (Index i = 0; i < d.samples(); ++i) means[(*d.truth)[i]] += d.X.col(i) / 400.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) CHECK((means[a] - means[b]).norm() >= 5.0 - 0.5);
}

TEST_CASE("gen_rings construction") {
  const auto d = gen_rings(40, {1.0, 3.0}, 0.0, 5);
  CHECK(d.samples() == 80);
  CHECK(d.features() == 2);
  for (Index i = 0; i < 80; ++i) {
    const double r = d.X.col(i).norm();
    CHECK(r == doctest::Approx((*d.truth)[i] == 0 ? 1.0 : 3.0).epsilon(1e-14));
  }
  const auto one = gen_rings(10, {2.0}, 0.1, 1);
  CHECK(std::all_of(one.truth->begin(), one.truth->end(), [](int l) { return l == 0; }));
  CHECK(gen_rings(40, {1.0, 3.0}, 0.05, 5).X == gen_rings(40, {1.0, 3.0}, 0.05, 5).X);
}

TEST_CASE("load_csv orientation, header and label checks") {
  const auto dir = scratch("csv");
  write_text(dir / "a.csv", "1,2\n3,4\n5,6\n");
  const auto d = load_csv(dir / "a.csv");
  CHECK(d.features() == 2);
  CHECK(d.samples() == 3);
  CHECK(d.X(1, 2) == 6.0);

  write_text(dir / "h.csv", "f1,f2\n1,2\n3,4\n5,6\n");
  CHECK(load_csv(dir / "h.csv").X == d.X);

  write_text(dir / "short.txt", "0\n1\n");
  try {
    load_csv(dir / "a.csv", dir / "short.txt");
    FAIL("expected a data error");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }

  write_text(dir / "ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(load_csv(dir / "ragged.csv"), DataError);
  write_text(dir / "nan.csv", "1,2\n3,nan\n");
  CHECK_THROWS_AS(load_csv(dir / "nan.csv"), DataError);
  write_text(dir / "missing.csv", "1,2\n3,\n");
  CHECK_THROWS_AS(load_csv(dir / "missing.csv"), DataError);
  CHECK_THROWS_AS(load_csv(dir / "nope.csv"), DataError);
}

TEST_CASE("csv round trip is exact") {
  const auto dir = scratch("roundtrip");
  const auto d = gen_blobs(2, 7, 3, 4.0, 1.0, 9);
  write_csv(d, dir / "x.csv");
  write_labels(*d.truth, dir / "y.txt");
  const auto back = load_csv(dir / "x.csv", dir / "y.txt");
  CHECK(back.X == d.X);
  CHECK(*back.truth == *d.truth);
}

TEST_CASE("grid expansion order") {
  HyperParams base;
  Grid g;
  g.alpha = {1, 2};
  g.gamma = {5, 6, 7};
  const auto pts = expand_grid(base, g);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].alpha == 1);
  CHECK(pts[0].gamma == 5);
  CHECK(pts[1].gamma == 6);
  CHECK(pts[3].alpha == 2);
  CHECK(pts[5].beta == base.beta);
  CHECK(expand_grid(base, Grid{}).size() == 1);
  const auto def = default_grid();
  CHECK(def.alpha.size() == 7);
  CHECK(def.beta.size() == 7);
  CHECK(def.gamma.size() == 3);
}

TEST_CASE("kernel selection parsing") {
  CHECK(KernelSelection::parse("bank").standard_bank);
  CHECK(KernelSelection::parse("gaussian:1,linear").specs.size() == 2);
  CHECK(KernelSelection::parse("cache:/tmp/k.ukrn").cache == fs::path("/tmp/k.ukrn"));
  CHECK(KernelSelection::parse("poly:1:2").to_string() == "poly:1:2");
  CHECK_THROWS_AS(KernelSelection::parse("wavelet"), InvalidArgument);
  CHECK(parse_solver("tsep") == SolverKind::tsep);
  CHECK_THROWS_AS(parse_solver("kmeans"), InvalidArgument);
}

TEST_CASE("run with a single grid point") {
  const auto d = gen_blobs(3, 15, 4, 6.0, 1.0, 1);
  const auto rep = run(small_config(), d);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].ok);
  CHECK(rep.samples == 45);
  CHECK(rep.accuracy.best == rep.records[0].accuracy);
}

TEST_CASE("run summary is the max over records and output is deterministic") {
  const auto d = gen_blobs(3, 15, 4, 6.0, 1.0, 2);
  RunConfig cfg = small_config();
  cfg.grid.alpha = {1e-3, 1e-1, 10};
  cfg.grid.beta = {1e-2, 1};
  const auto rep = run(cfg, d);
  REQUIRE(rep.records.size() == 6);
  double best = 0, mean = 0;
  for (const auto& r : rep.records) {
    CHECK(r.index == static_cast<std::size_t>(&r - rep.records.data()));
    best = std::max(best, *r.accuracy);
    mean += *r.accuracy / 6.0;
  }
  CHECK(*rep.accuracy.best == best);
  CHECK(*rep.accuracy.mean == doctest::Approx(mean).epsilon(1e-14));

  cfg.parallel_grid = false;
  const auto again = run(cfg, d);
  CHECK(format_report(again, "T") == format_report(rep, "T"));
  CHECK(records_csv(again) == records_csv(rep));
  const std::string a = format_report(rep, "2020-01-01T00:00:00Z");
  const std::string b = format_report(rep, "2030-01-01T00:00:00Z");
  CHECK(a != b);
  CHECK(std::count(a.begin(), a.end(), '\n') == std::count(b.begin(), b.end(), '\n'));
}

TEST_CASE("report records carry the full tuple") {
  const auto d = gen_blobs(3, 10, 3, 6.0, 1.0, 3);
  const auto text = format_report(run(small_config(), d), "T");
  for (const char* key : {"alpha=", "beta=", "gamma=", "mu=", "seed=", "iterations=", "converged=",
                          "residual=", "accuracy=", "nmi=", "purity="})
    CHECK(text.find(key) != std::string::npos);
  CHECK(text.find("generated_at=T") != std::string::npos);
}

TEST_CASE("failed grid points are recorded and the run continues") {
  // mu*I + 2K stops being positive definite once mu < 2 for this kernel
  const auto d = gen_blobs(3, 10, 3, 6.0, 1.0, 4);
  const auto dir = scratch("indefinite");
  Matrix K = Matrix::Identity(30, 30);
  K(0, 0) = -1.0;
  cache_write(KernelMatrix{K, KernelSpec::linear(), true}, dir / "k.ukrn");
  RunConfig cfg = small_config();
  cfg.kernel = "cache:" + (dir / "k.ukrn").string();
  cfg.grid.mu = {100.0, 1.0};
  const auto rep = run(cfg, d);
  REQUIRE(rep.records.size() == 2);
  CHECK(rep.records[0].ok);
  CHECK_FALSE(rep.records[1].ok);
  CHECK_FALSE(rep.records[1].error.empty());
  CHECK(rep.failed == 1);
}

TEST_CASE("scmk and tsep through the harness") {
  const auto d = gen_blobs(3, 10, 3, 6.0, 1.0, 5);
  RunConfig cfg = small_config();
  cfg.solver = SolverKind::scmk;
  cfg.kernel = "gaussian:1,linear";
  const auto rep = run(cfg, d);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].weights.size() == 2);
  cfg.solver = SolverKind::tsep;
  cfg.kernel = "linear";
  CHECK(run(cfg, d).records[0].ok);
}
