#pragma once

// Shared fixtures and brute-force oracles for the unit tests.

#include "unispec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace testutil {

using unispec::Index;
using unispec::Matrix;
using unispec::Vector;

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = normal(rng);
  return A;
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix A = gaussian_matrix(n, n, seed);
  return 0.5 * (A + A.transpose());
}

inline Matrix random_spd(Index n, std::uint64_t seed) {
  const Matrix A = gaussian_matrix(n, n, seed);
  Matrix S = A * A.transpose();
  S.diagonal().array() += static_cast<double>(n);
  return S;
}

/// Nonnegative weights with zero diagonal.
inline Matrix random_graph(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix Z(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) Z(i, j) = i == j ? 0.0 : unif(rng);
  return Z;
}

/// Haar orthogonal matrix via QR with sign correction.
inline Matrix random_orthogonal(Index n, std::uint64_t seed) {
  const Matrix A = gaussian_matrix(n, n, seed);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

inline Matrix random_stiefel(Index n, Index c, std::uint64_t seed) {
  return random_orthogonal(n, seed).leftCols(c);
}

/// Laplacian assembled entry by entry from the definition.
inline Matrix naive_laplacian(const Matrix& Z) {
  const Index n = Z.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = (Z(i, j) + Z(j, i)) / 2.0;
      L(i, j) = -w;
      L(i, i) += w;
    }
  }
  return L;
}

/// Best agreement over all relabelings of `predicted` (labels in [0, c)).
inline double brute_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                             int c) {
  std::vector<int> perm(c);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (perm[predicted[i]] == truth[i]) ++hit;
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

/// Minimizer of sum_i z_i^T A z_i / 2 - b_i^T z_i by plain gradient descent.
inline Matrix gradient_descent_quadratic(const Matrix& A, const Matrix& B, double step,
                                         long iterations) {
  Matrix Z = Matrix::Zero(B.rows(), B.cols());
  for (long it = 0; it < iterations; ++it) Z -= step * (A * Z - B);
  return Z;
}

inline double max_abs_diff(const Matrix& A, const Matrix& B) {
  return (A - B).cwiseAbs().maxCoeff();
}

}  // namespace testutil
