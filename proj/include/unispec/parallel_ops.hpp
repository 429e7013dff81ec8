#pragma once

// Data-parallel inner loops shared by the solvers.
//
// Every kernel exists twice: `unispec::par` (OpenMP) and `unispec::serial`
// (plain loops, the reference kept for tests and the benchmark). Both
// variants evaluate each output entry with the same floating-point
// operation sequence, so their results are bit-identical regardless of the
// thread count. Only the loop distribution differs.

#include "unispec/numerics.hpp"

#include <span>
#include <vector>

namespace unispec {

/// Result of one nearest-center assignment sweep.
struct Assignment {
  std::vector<int> labels;
  std::vector<double> distances;  // squared distance to the assigned center
  long changed = 0;
};

namespace serial {

/// D(i,j) = ||x_i - x_j||^2 for samples stored as the columns of X (m x n).
Matrix column_squared_distances(const Matrix& X);

/// G(i,j) = x_i^T x_j for samples stored as the columns of X.
Matrix column_gram(const Matrix& X);

/// D(i,j) = ||P(i,:) - P(j,:)||^2 over the rows of P.
Matrix row_squared_distances(const Matrix& P);

/// X(:,j) = A^{-1} B(:,j), one independent solve per column.
Matrix solve_columns(const SpdFactorization& A, const Matrix& B);

/// X = M B in fixed-width column blocks (M square).
Matrix multiply_columns(const Matrix& M, const Matrix& B);

/// Assigns each row of `points` to its nearest row of `centers`. Ties keep
/// the current label when it is among the minimizers, otherwise the lowest
/// center index wins. `current` may be empty (no previous assignment).
Assignment assign_nearest(const Matrix& points, const Matrix& centers,
                          std::span<const int> current);

}  // namespace serial

namespace par {

Matrix column_squared_distances(const Matrix& X);
Matrix column_gram(const Matrix& X);
Matrix row_squared_distances(const Matrix& P);
Matrix solve_columns(const SpdFactorization& A, const Matrix& B);
Matrix multiply_columns(const Matrix& M, const Matrix& B);
Assignment assign_nearest(const Matrix& points, const Matrix& centers,
                          std::span<const int> current);

}  // namespace par

/// Number of OpenMP worker threads the `par` kernels will use.
int max_threads();

}  // namespace unispec
