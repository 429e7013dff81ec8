#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace unispec {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative symmetry tolerance used at every symmetric entry point.
inline constexpr double kSymmetryTolerance = 1e-10;

/// Throws DataError if any entry is NaN or +-Inf.
void require_finite(const Matrix& A, std::string_view what);

/// Throws InvalidArgument unless A is rows x cols (either may be -1 to skip).
void require_shape(const Matrix& A, Index rows, Index cols, std::string_view what);

/// Induced infinity norm (maximum absolute row sum).
double inf_norm(const Matrix& A);

/// Largest |A_ij - A_ji|.
double symmetry_violation(const Matrix& A);

/// Returns (A + A^T)/2 after checking that A is square, finite and symmetric
/// within kSymmetryTolerance * max(1, max|A_ij|). Larger violations are a
/// DataError rather than silently averaged away.
Matrix symmetrized(const Matrix& A, std::string_view what);

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymEigResult {
  Vector eigenvalues;
  Matrix eigenvectors;  // column j pairs with eigenvalues(j)
};

/// The k algebraically smallest eigenpairs of symmetric A (1 <= k <= n).
/// Full dense decomposition; orthonormal eigenvectors.
SymEigResult sym_eig_smallest(const Matrix& A, Index k);

struct SvdResult {
  Matrix U;
  Vector singular_values;  // nonnegative, descending
  Matrix V;
};

/// Thin SVD: A = U diag(s) V^T with U (m x p), V (n x p), p = min(m, n).
SvdResult thin_svd(const Matrix& A);

/// Cholesky factorization of a symmetric positive definite matrix, computed
/// once and reused for any number of right-hand sides.
class SpdFactorization {
 public:
  /// Throws FactorizationError naming the first non-positive pivot.
  explicit SpdFactorization(const Matrix& A);

  Index size() const { return llt_.rows(); }

  Matrix solve(const Matrix& B) const;

  /// Single right-hand side; used by the column-parallel kernels so that
  /// every column goes through the same code path.
  Vector solve_column(const Eigen::Ref<const Vector>& b) const;

  /// Solves a block of right-hand sides without validation.
  Matrix solve_block(const Eigen::Ref<const Matrix>& B) const;

  /// A^{-1} from the factor, symmetrized.
  Matrix inverse() const;

  const Eigen::LLT<Matrix>& llt() const { return llt_; }

 private:
  Eigen::LLT<Matrix> llt_;
};

/// X with A X = B for SPD A.
Matrix spd_solve(const Matrix& A, const Matrix& B);

/// Nearest matrix with orthonormal columns (polar factor U V^T of A).
Matrix orthonormalize(const Matrix& A);

/// ||A^T A - I||_F.
double orthonormality_error(const Matrix& A);

}  // namespace unispec
