#include "unispec/datasets.hpp"

#include "unispec/errors.hpp"

#include <fmt/core.h>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace unispec {

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw DataError("dataset is empty");
  require_finite(X, "dataset " + name);
  if (truth && static_cast<Index>(truth->size()) != X.cols()) {
    throw DataError(fmt::format("dataset {}: {} truth labels for {} samples", name,
                                truth->size(), X.cols()));
  }
}

namespace {

Matrix haar_orthogonal(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR();
  for (Index j = 0; j < d; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

Matrix blob_centers(int c, int dim, double min_distance, std::mt19937_64& rng) {
  Matrix centers = Matrix::Zero(dim, c);
  if (min_distance <= 0.0) return centers;
  if (c <= dim) {
    // scaled basis vectors are a regular simplex with edge min_distance
    for (int k = 0; k < c; ++k) centers(k, k) = min_distance / std::numbers::sqrt2;
    return haar_orthogonal(dim, rng) * centers;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double radius = min_distance * c;
  for (int k = 0; k < c; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 0 && attempt % 1000 == 0) radius *= 1.5;
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = normal(rng);
      v *= radius * std::pow(unit(rng), 1.0 / dim) / v.norm();
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) ok = (centers.col(j) - v).norm() >= min_distance;
      if (ok) {
        centers.col(k) = v;
        break;
      }
    }
  }
  return centers;
}

}  // namespace

Dataset gen_blobs(int c, int per_cluster, int dim, double separation, double noise_sigma,
                  std::uint64_t seed) {
  if (c < 1 || per_cluster < 1 || dim < 1)
    throw InvalidArgument("gen_blobs: clusters, per-cluster count and dimension must be >= 1");
  if (!(separation >= 0.0) || !(noise_sigma >= 0.0))
    throw InvalidArgument("gen_blobs: separation and noise must be nonnegative");

  std::mt19937_64 rng(seed);
  const Matrix centers = blob_centers(c, dim, separation * noise_sigma, rng);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset out;
  out.name = fmt::format("blobs(c={},per={},dim={},sep={},sigma={},seed={})", c, per_cluster, dim,
                         separation, noise_sigma, seed);
  out.X.resize(dim, static_cast<Index>(c) * per_cluster);
  out.truth.emplace();
  Index col = 0;
  for (int k = 0; k < c; ++k)
    for (int p = 0; p < per_cluster; ++p, ++col) {
      for (int i = 0; i < dim; ++i) out.X(i, col) = centers(i, k) + noise_sigma * normal(rng);
      out.truth->push_back(k);
    }
  return out;
}

Dataset gen_rings(int n_per_ring, const std::vector<double>& radii, double noise_sigma,
                  std::uint64_t seed) {
  if (n_per_ring < 1 || radii.empty())
    throw InvalidArgument("gen_rings: need at least one ring with at least one point");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("gen_rings: noise must be nonnegative");
  for (double r : radii)
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("gen_rings: radii must be >= 0");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset out;
  out.name = fmt::format("rings(per={},radii={},sigma={},seed={})", n_per_ring,
                         fmt::join(radii, "/"), noise_sigma, seed);
  out.X.resize(2, static_cast<Index>(radii.size()) * n_per_ring);
  out.truth.emplace();
  Index col = 0;
  for (std::size_t k = 0; k < radii.size(); ++k)
    for (int p = 0; p < n_per_ring; ++p, ++col) {
      const double angle = 2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
      out.X(0, col) = radii[k] * std::cos(angle);
      out.X(1, col) = radii[k] * std::sin(angle);
      if (noise_sigma > 0.0) {
        out.X(0, col) += noise_sigma * normal(rng);
        out.X(1, col) += noise_sigma * normal(rng);
      }
      out.truth->push_back(static_cast<int>(k));
    }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(t, &used);
    return used == t.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& features,
                 const std::optional<std::filesystem::path>& labels) {
  std::ifstream in(features);
  if (!in) throw DataError("cannot open features file " + features.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  bool first_content = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> row(cells.size());
    std::size_t bad = cells.size();
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], row[j])) {
        bad = j;
        break;
      }
    }
    if (bad != cells.size()) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      throw DataError(fmt::format("{}:{}: cell {} ('{}') is not a finite number", features.string(),
                                  line_no, bad + 1, trim(cells[bad])));
    }
    first_content = false;
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw DataError(fmt::format("{}:{}: ragged row with {} cells, expected {}",
                                  features.string(), line_no, row.size(), width));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("features file " + features.string() + " has no data rows");

  Dataset out;
  out.name = features.filename().string();
  out.X.resize(static_cast<Index>(width), static_cast<Index>(rows.size()));
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t f = 0; f < width; ++f) out.X(f, s) = rows[s][f];

  if (labels) {
    out.truth = load_labels(*labels);
    if (static_cast<Index>(out.truth->size()) != out.samples()) {
      throw DataError(fmt::format("labels file {} has {} labels but features file has {} samples",
                                  labels->string(), out.truth->size(), out.samples()));
    }
  }
  out.validate();
  return out;
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file " + path.string());
  std::vector<int> labels;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size() || v < 0 || v > 1'000'000'000) throw std::invalid_argument(t);
      labels.push_back(static_cast<int>(v));
    } catch (const std::exception&) {
      throw DataError(fmt::format("{}:{}: '{}' is not a nonnegative integer label", path.string(),
                                  line_no, t));
    }
  }
  return labels;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (Index s = 0; s < data.samples(); ++s) {
    for (Index f = 0; f < data.features(); ++f) {
      if (f) out << ',';
      out << fmt::format("{}", data.X(f, s));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

void write_labels(const std::vector<int>& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (int l : labels) out << l << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace unispec
