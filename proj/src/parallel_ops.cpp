#include "unispec/parallel_ops.hpp"

#include "unispec/errors.hpp"

#include <fmt/core.h>
#include <omp.h>

#include <limits>

namespace unispec {

namespace {

inline double column_sqdist(const Matrix& X, Index i, Index j) {
  double s = 0.0;
  for (Index k = 0; k < X.rows(); ++k) {
    const double d = X(k, i) - X(k, j);
    s += d * d;
  }
  return s;
}

inline double column_dot(const Matrix& X, Index i, Index j) {
  double s = 0.0;
  for (Index k = 0; k < X.rows(); ++k) s += X(k, i) * X(k, j);
  return s;
}

inline double row_sqdist(const Matrix& P, Index i, Index j) {
  double s = 0.0;
  for (Index k = 0; k < P.cols(); ++k) {
    const double d = P(i, k) - P(j, k);
    s += d * d;
  }
  return s;
}

// Nearest center for one point; shared by both assignment variants.
inline void assign_one(const Matrix& points, const Matrix& centers, Index i, int previous,
                       int& label, double& distance) {
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (Index k = 0; k < centers.rows(); ++k) {
    double s = 0.0;
    for (Index d = 0; d < points.cols(); ++d) {
      const double t = points(i, d) - centers(k, d);
      s += t * t;
    }
    if (s < best) {
      best = s;
      best_k = static_cast<int>(k);
    }
  }
  if (previous >= 0 && previous < centers.rows()) {
    double s = 0.0;
    for (Index d = 0; d < points.cols(); ++d) {
      const double t = points(i, d) - centers(previous, d);
      s += t * t;
    }
    if (s == best) best_k = previous;
  }
  label = best_k;
  distance = best;
}

void check_assign_args(const Matrix& points, const Matrix& centers, std::span<const int> current) {
  if (points.cols() != centers.cols()) {
    throw InvalidArgument(fmt::format("assign_nearest: points have {} columns, centers {}",
                                      points.cols(), centers.cols()));
  }
  if (!current.empty() && static_cast<Index>(current.size()) != points.rows()) {
    throw InvalidArgument("assign_nearest: current labels length differs from point count");
  }
}

// Both variants solve the same fixed-width column blocks, so results agree bitwise.
constexpr Index kSolveBlock = 32;

Index solve_block_count(Index cols) { return (cols + kSolveBlock - 1) / kSolveBlock; }

void solve_block(const SpdFactorization& A, const Matrix& B, Matrix& X, Index b) {
  const Index first = b * kSolveBlock;
  const Index width = std::min(kSolveBlock, B.cols() - first);
  X.middleCols(first, width) = A.solve_block(B.middleCols(first, width));
}

void multiply_block(const Matrix& M, const Matrix& B, Matrix& X, Index b) {
  const Index first = b * kSolveBlock;
  const Index width = std::min(kSolveBlock, B.cols() - first);
  X.middleCols(first, width).noalias() = M * B.middleCols(first, width);
}

void check_multiply_args(const Matrix& M, const Matrix& B) {
  if (M.rows() != M.cols() || B.rows() != M.cols())
    throw InvalidArgument("multiply_columns: shape mismatch");
}

}  // namespace

namespace serial {

Matrix column_squared_distances(const Matrix& X) {
  const Index n = X.cols();
  Matrix D = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double v = column_sqdist(X, i, j);
      D(i, j) = v;
      D(j, i) = v;
    }
  return D;
}

Matrix column_gram(const Matrix& X) {
  const Index n = X.cols();
  Matrix G(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) {
      const double v = column_dot(X, i, j);
      G(i, j) = v;
      G(j, i) = v;
    }
  return G;
}

Matrix row_squared_distances(const Matrix& P) {
  const Index n = P.rows();
  Matrix D = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double v = row_sqdist(P, i, j);
      D(i, j) = v;
      D(j, i) = v;
    }
  return D;
}

Matrix solve_columns(const SpdFactorization& A, const Matrix& B) {
  if (B.rows() != A.size()) throw InvalidArgument("solve_columns: row count mismatch");
  Matrix X(B.rows(), B.cols());
  const Index blocks = solve_block_count(B.cols());
  for (Index b = 0; b < blocks; ++b) solve_block(A, B, X, b);
  return X;
}

Matrix multiply_columns(const Matrix& M, const Matrix& B) {
  check_multiply_args(M, B);
  Matrix X(M.rows(), B.cols());
  const Index blocks = solve_block_count(B.cols());
  for (Index b = 0; b < blocks; ++b) multiply_block(M, B, X, b);
  return X;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centers,
                          std::span<const int> current) {
  check_assign_args(points, centers, current);
  const Index n = points.rows();
  Assignment out;
  out.labels.resize(n);
  out.distances.resize(n);
  for (Index i = 0; i < n; ++i) {
    const int prev = current.empty() ? -1 : current[i];
    assign_one(points, centers, i, prev, out.labels[i], out.distances[i]);
    if (out.labels[i] != prev) ++out.changed;
  }
  return out;
}

}  // namespace serial

namespace par {

Matrix column_squared_distances(const Matrix& X) {
  const Index n = X.cols();
  Matrix D = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double v = column_sqdist(X, i, j);
      D(i, j) = v;
      D(j, i) = v;
    }
  return D;
}

Matrix column_gram(const Matrix& X) {
  const Index n = X.cols();
  Matrix G(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) {
      const double v = column_dot(X, i, j);
      G(i, j) = v;
      G(j, i) = v;
    }
  return G;
}

Matrix row_squared_distances(const Matrix& P) {
  const Index n = P.rows();
  Matrix D = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double v = row_sqdist(P, i, j);
      D(i, j) = v;
      D(j, i) = v;
    }
  return D;
}

Matrix solve_columns(const SpdFactorization& A, const Matrix& B) {
  if (B.rows() != A.size()) throw InvalidArgument("solve_columns: row count mismatch");
  Matrix X(B.rows(), B.cols());
  const Index blocks = solve_block_count(B.cols());
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) solve_block(A, B, X, b);
  return X;
}

Matrix multiply_columns(const Matrix& M, const Matrix& B) {
  check_multiply_args(M, B);
  Matrix X(M.rows(), B.cols());
  const Index blocks = solve_block_count(B.cols());
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) multiply_block(M, B, X, b);
  return X;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centers,
                          std::span<const int> current) {
  check_assign_args(points, centers, current);
  const Index n = points.rows();
  Assignment out;
  out.labels.resize(n);
  out.distances.resize(n);
  long changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
  for (Index i = 0; i < n; ++i) {
    const int prev = current.empty() ? -1 : current[i];
    assign_one(points, centers, i, prev, out.labels[i], out.distances[i]);
    if (out.labels[i] != prev) ++changed;
  }
  out.changed = changed;
  return out;
}

}  // namespace par

int max_threads() { return omp_get_max_threads(); }

}  // namespace unispec
