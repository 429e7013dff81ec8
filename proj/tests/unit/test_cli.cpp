#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unispec/cli.hpp"
#include "unispec/kernel_bank.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace unispec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("unispec_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path make_blobs(const fs::path& dir) {
  const auto r = cli({"gen-blobs", "--clusters", "3", "--per-cluster", "12", "--dim", "4",
                      "--separation", "6", "--seed", "2", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"run"}).code == kExitUsage);
  CHECK(cli({"gen-blobs", "--clusters", "-2", "--out", "/tmp/x"}).code == kExitUsage);
}

TEST_CASE("gen-blobs and gen-rings write datasets") {
  const auto dir = make_blobs(scratch("gen"));
  CHECK(fs::exists(dir / "features.csv"));
  CHECK(fs::exists(dir / "labels.txt"));
  const auto rings = scratch("rings");
  CHECK(cli({"gen-rings", "--per-ring", "20", "--radii", "1,3", "--noise", "0.05", "--out",
             rings.string()}).code == kExitOk);
  CHECK(fs::exists(rings / "features.csv"));
}

TEST_CASE("kernels build and inspect") {
  const auto dir = make_blobs(scratch("kernels"));
  const auto path = dir / "k.ukrn";
  CHECK(cli({"kernels", "build", "--features", (dir / "features.csv").string(), "--kernel",
             "gaussian:1", "--out", path.string()}).code == kExitOk);
  CHECK(cache_read(path).K.rows() == 36);
  const auto r = cli({"kernels", "inspect", path.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("36") != std::string::npos);
  CHECK(r.out.find("gaussian") != std::string::npos);

  std::ofstream(dir / "bad.ukrn") << "garbage";
  CHECK(cli({"kernels", "inspect", (dir / "bad.ukrn").string()}).code == kExitData);
  CHECK(cli({"kernels", "build", "--features", (dir / "features.csv").string(), "--kernel",
             "gaussian:-1", "--out", path.string()}).code == kExitUsage);
}

TEST_CASE("run writes a report, records and labels, deterministically") {
  const auto dir = make_blobs(scratch("run"));
  const std::vector<std::string> args{
      "run", "--features", (dir / "features.csv").string(), "--labels",
      (dir / "labels.txt").string(), "--mu", "100", "--grid-alpha", "0.01,1", "--beta", "0.01",
      "--timestamp", "fixed", "--out", (dir / "out").string()};
  const auto a = cli(args);
  REQUIRE(a.code == kExitOk);
  const std::string report = slurp(dir / "out" / "report.txt");
  const std::string csv = slurp(dir / "out" / "records.csv");
  CHECK(report.find("best accuracy=") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(fs::exists(dir / "out" / "labels.txt"));
  CHECK(a.out == report);

  const auto b = cli(args);
  CHECK(b.out == a.out);
  CHECK(slurp(dir / "out" / "records.csv") == csv);

  const auto eval = cli({"eval", "--predicted", (dir / "out" / "labels.txt").string(), "--truth",
                         (dir / "labels.txt").string()});
  CHECK(eval.code == kExitOk);
  CHECK(eval.out.find("accuracy=") != std::string::npos);
}

TEST_CASE("run exit codes for data and solver failures") {
  const auto dir = make_blobs(scratch("fail"));
  CHECK(cli({"run", "--features", (dir / "missing.csv").string()}).code == kExitData);
  CHECK(cli({"run", "--features", (dir / "features.csv").string(), "--solver", "magic"}).code ==
        kExitUsage);
  CHECK(cli({"run", "--features", (dir / "features.csv").string(), "--clusters", "999"}).code ==
        kExitUsage);

  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(36, 36);
  K(0, 0) = -1.0;
  cache_write(KernelMatrix{K, KernelSpec::linear(), true}, dir / "indefinite.ukrn");
  const auto r = cli({"run", "--features", (dir / "features.csv").string(), "--clusters", "3",
                      "--kernel", "cache:" + (dir / "indefinite.ukrn").string(), "--mu", "1"});
  CHECK(r.code == kExitSolver);
}
