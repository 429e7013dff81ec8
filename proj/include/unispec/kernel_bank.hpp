#pragma once

#include "unispec/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace unispec {

/// A base kernel function: gaussian(t), linear, or polynomial(a, b).
struct KernelSpec {
  enum class Kind : std::uint8_t { gaussian = 0, linear = 1, polynomial = 2 };

  Kind kind = Kind::linear;
  double t = 0.0;  // gaussian bandwidth factor, > 0
  double a = 0.0;  // polynomial offset
  int b = 1;       // polynomial degree, >= 1

  static KernelSpec gaussian(double t);
  static KernelSpec linear();
  static KernelSpec polynomial(double a, int b);

  /// Throws InvalidArgument on t <= 0, b < 1 or non-finite parameters.
  void validate() const;

  /// Canonical text form, e.g. "gaussian:0.1", "linear", "poly:1:2".
  std::string to_string() const;

  /// Inverse of to_string(). Also accepts "gauss" and "polynomial".
  static KernelSpec parse(const std::string& text);

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Symmetric PSD Gram matrix over n samples. `spec` is empty for convex
/// combinations produced by combine().
struct KernelMatrix {
  Matrix K;
  std::optional<KernelSpec> spec;
  bool normalized = false;

  Index n() const { return K.rows(); }
};

/// Ordered list of kernels over the same samples.
struct KernelBank {
  std::vector<KernelMatrix> kernels;

  std::size_t size() const { return kernels.size(); }
  Index n() const { return kernels.empty() ? 0 : kernels.front().n(); }

  /// Throws InvalidArgument if empty or if the members disagree on n.
  void validate() const;
};

/// Kernel weights with sum_i sqrt(w_i) = 1 and w_i >= 0.
struct WeightVector {
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  double sqrt_sum() const;
  bool feasible(double tol = 1e-10) const;
};

// Tolerance separating round-off negativity from a broken kernel.
inline constexpr double kPsdRepairTolerance = 1e-8;

/// Builds K for samples stored as the columns of X (m features x n samples).
/// Gaussian kernels use exp(-||x_i - x_j||^2 / (t * d_max^2)), d_max being
/// the largest pairwise distance; identical samples are rejected for them.
KernelMatrix build_kernel(const Matrix& X, const KernelSpec& spec);

/// Divides every entry by the largest entry, so the result peaks at exactly 1.
KernelMatrix normalize_kernel(const KernelMatrix& K);

/// Clips eigenvalues in [-1e-8 ||K||_inf, 0) to zero and reassembles K.
/// Inputs that are already PSD come back bit-identical; anything more
/// negative is a DataError.
KernelMatrix repair_psd(const KernelMatrix& K);

/// build_kernel -> normalize_kernel -> repair_psd.
KernelMatrix prepared_kernel(const Matrix& X, const KernelSpec& spec);

/// The twelve kernels of the standard bank, in order: gaussian with
/// t in {0.01, 0.05, 0.1, 1, 10, 50, 100}, linear, polynomial with
/// (a, b) in {(0,2), (0,4), (1,2), (1,4)}.
std::vector<KernelSpec> standard_specs();

/// prepared_kernel() for every entry of standard_specs().
KernelBank standard_bank(const Matrix& X);

/// Bank from an explicit spec list, each kernel prepared.
KernelBank make_bank(const Matrix& X, std::span<const KernelSpec> specs);

/// K_w = sum_i w_i K^i with the feasibility of w checked.
KernelMatrix combine(const KernelBank& bank, const WeightVector& w);

/// Same sum over raw nonnegative coefficients, without the sqrt-simplex
/// check. Used for the initial w_i = 1/r of the multiple-kernel solver.
KernelMatrix combine_raw(const KernelBank& bank, std::span<const double> coefficients);

// Binary cache ----------------------------------------------------------------
//
// Layout, all little-endian:
//   "UKRN" | u32 version = 1 | u64 n | u8 tag (0 gaussian, 1 linear,
//   2 polynomial) | f64 params (gaussian: t; polynomial: a, b) |
//   u8 normalized | n*n f64 entries, row-major.

inline constexpr std::uint32_t kCacheVersion = 1;

void cache_write(const KernelMatrix& K, const std::filesystem::path& path);
KernelMatrix cache_read(const std::filesystem::path& path);

}  // namespace unispec
