#pragma once

#include "unispec/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace unispec {

/// Samples are the columns of X (m features x n samples).
struct Dataset {
  Matrix X;
  std::optional<std::vector<int>> truth;
  std::string name;

  Index features() const { return X.rows(); }
  Index samples() const { return X.cols(); }
  void validate() const;
};

/// c isotropic Gaussian clusters of `per_cluster` points in `dim`
/// dimensions, truth labels cluster-major. Centers are pairwise at least
/// separation * noise_sigma apart: for c <= dim they are a randomly rotated
/// regular simplex with exactly that edge, otherwise rejection-sampled.
Dataset gen_blobs(int c, int per_cluster, int dim, double separation, double noise_sigma,
                  std::uint64_t seed);

/// Concentric 2-d rings with uniform random angles and isotropic noise;
/// truth is the ring index.
Dataset gen_rings(int n_per_ring, const std::vector<double>& radii, double noise_sigma,
                  std::uint64_t seed);

/// Features CSV: one sample per row, comma separated; a first line that does
/// not parse as numbers is treated as a header. Labels file: one integer per
/// line (blank lines ignored).
Dataset load_csv(const std::filesystem::path& features,
                 const std::optional<std::filesystem::path>& labels = std::nullopt);

std::vector<int> load_labels(const std::filesystem::path& path);

/// Writes samples as CSV rows (shortest round-trip decimal form).
void write_csv(const Dataset& data, const std::filesystem::path& path);
void write_labels(const std::vector<int>& labels, const std::filesystem::path& path);

}  // namespace unispec
