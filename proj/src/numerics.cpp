#include "unispec/numerics.hpp"

#include "unispec/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

namespace unispec {

namespace {

// Unblocked Cholesky used only to name the pivot after Eigen's LLT has
// already reported failure.
Index first_bad_pivot(const Matrix& A) {
  const Index n = A.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = A(j, j);
    for (Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) return j;
    L(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return n - 1;
}

}  // namespace

void require_finite(const Matrix& A, std::string_view what) {
  if (!A.allFinite()) {
    throw DataError(fmt::format("{}: matrix contains non-finite entries", what));
  }
}

void require_shape(const Matrix& A, Index rows, Index cols, std::string_view what) {
  if ((rows >= 0 && A.rows() != rows) || (cols >= 0 && A.cols() != cols)) {
    throw InvalidArgument(fmt::format("{}: expected {}x{}, got {}x{}", what, rows, cols,
                                      A.rows(), A.cols()));
  }
}

double inf_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

double symmetry_violation(const Matrix& A) {
  double worst = 0.0;
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = j + 1; i < A.rows(); ++i)
      worst = std::max(worst, std::abs(A(i, j) - A(j, i)));
  return worst;
}

Matrix symmetrized(const Matrix& A, std::string_view what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw InvalidArgument(
        fmt::format("{}: expected a non-empty square matrix, got {}x{}", what, A.rows(), A.cols()));
  }
  require_finite(A, what);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double violation = symmetry_violation(A);
  if (violation > kSymmetryTolerance * scale) {
    throw DataError(fmt::format("{}: symmetry violation {:.3e} exceeds tolerance {:.3e}", what,
                                violation, kSymmetryTolerance * scale));
  }
  Matrix S(A.rows(), A.cols());
  for (Index j = 0; j < A.cols(); ++j) {
    S(j, j) = A(j, j);
    for (Index i = j + 1; i < A.rows(); ++i) {
      const double v = 0.5 * (A(i, j) + A(j, i));
      S(i, j) = v;
      S(j, i) = v;
    }
  }
  return S;
}

SymEigResult sym_eig_smallest(const Matrix& A, Index k) {
  const Matrix S = symmetrized(A, "sym_eig_smallest");
  const Index n = S.rows();
  if (k < 1 || k > n) {
    throw InvalidArgument(fmt::format("sym_eig_smallest: k = {} outside [1, {}]", k, n));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw SolverError("sym_eig_smallest: eigensolver did not converge");
  }
  return {solver.eigenvalues().head(k), solver.eigenvectors().leftCols(k)};
}

SvdResult thin_svd(const Matrix& A) {
  if (A.rows() == 0 || A.cols() == 0) throw InvalidArgument("thin_svd: empty matrix");
  require_finite(A, "thin_svd");
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SpdFactorization::SpdFactorization(const Matrix& A) {
  const Matrix S = symmetrized(A, "spd_solve");
  llt_.compute(S);
  if (llt_.info() != Eigen::Success) {
    const Index pivot = first_bad_pivot(S);
    throw FactorizationError(
        fmt::format("spd_solve: matrix is not positive definite (pivot {} is non-positive)", pivot),
        static_cast<long>(pivot));
  }
}

Vector SpdFactorization::solve_column(const Eigen::Ref<const Vector>& b) const {
  Vector x = b;
  llt_.solveInPlace(x);
  return x;
}

Matrix SpdFactorization::solve_block(const Eigen::Ref<const Matrix>& B) const {
  return llt_.solve(B);
}

Matrix SpdFactorization::inverse() const {
  const Matrix inv = llt_.solve(Matrix::Identity(size(), size()));
  return 0.5 * (inv + inv.transpose());
}

Matrix SpdFactorization::solve(const Matrix& B) const {
  if (B.rows() != size()) {
    throw InvalidArgument(
        fmt::format("spd_solve: right-hand side has {} rows, expected {}", B.rows(), size()));
  }
  require_finite(B, "spd_solve");
  Matrix X(B.rows(), B.cols());
  for (Index j = 0; j < B.cols(); ++j) X.col(j) = solve_column(B.col(j));
  return X;
}

Matrix spd_solve(const Matrix& A, const Matrix& B) { return SpdFactorization(A).solve(B); }

Matrix orthonormalize(const Matrix& A) {
  const SvdResult svd = thin_svd(A);
  return svd.U * svd.V.transpose();
}

double orthonormality_error(const Matrix& A) {
  const Matrix G = A.transpose().lazyProduct(A);
  return (G - Matrix::Identity(A.cols(), A.cols())).norm();
}

}  // namespace unispec
