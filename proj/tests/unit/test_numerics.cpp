#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "unispec/errors.hpp"
#include "unispec/numerics.hpp"

#include <complex>

using namespace unispec;
using testutil::gaussian_matrix;

namespace {

// Roots of the characteristic polynomial of a symmetric matrix, n <= 4,
// from its coefficients (Faddeev-LeVerrier) and the companion eigenvalues.
std::vector<double> charpoly_roots(const Matrix& A) {
  const Index n = A.rows();
  std::vector<double> coeff(n + 1, 0.0);  // det(lambda I - A) = sum coeff[k] lambda^(n-k)
  coeff[0] = 1.0;
  Matrix M = Matrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    M = A * M + coeff[k - 1] * Matrix::Identity(n, n);
    coeff[k] = -(A * M).trace() / static_cast<double>(k);
  }
  Matrix companion = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) companion(0, k) = -coeff[k + 1];
  for (Index k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion, false);
  std::vector<double> roots;
  for (Index k = 0; k < n; ++k) roots.push_back(es.eigenvalues()(k).real());
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

TEST_CASE("sym_eig_smallest on a 2x2 graph Laplacian") {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  const auto r = sym_eig_smallest(A, 2);
  CHECK(r.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("sym_eig_smallest on the identity") {
  const auto r = sym_eig_smallest(Matrix::Identity(5, 5), 3);
  for (Index j = 0; j < 3; ++j) CHECK(r.eigenvalues(j) == doctest::Approx(1.0));
  CHECK(orthonormality_error(r.eigenvectors) <= 1e-14);
}

TEST_CASE("sym_eig_smallest residuals and orthonormality") {
  for (Index n : {2, 5, 10, 20}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Matrix A = testutil::random_symmetric(n, 1000 * n + seed);
      const Index k = std::min<Index>(3, n);
      const auto r = sym_eig_smallest(A, k);
      for (Index j = 0; j < k; ++j) {
        const double res = (A * r.eigenvectors.col(j) - r.eigenvalues(j) * r.eigenvectors.col(j)).norm();
        REQUIRE(res <= 1e-8);
      }
      REQUIRE(orthonormality_error(r.eigenvectors) <= 1e-10);
      for (Index j = 1; j < k; ++j) REQUIRE(r.eigenvalues(j - 1) <= r.eigenvalues(j));
    }
  }
}

TEST_CASE("sym_eig_smallest full spectrum sums to the trace") {
  for (Index n : {2, 5, 10, 20}) {
    const Matrix A = testutil::random_symmetric(n, 77 + n);
    const auto r = sym_eig_smallest(A, n);
    CHECK(std::abs(r.eigenvalues.sum() - A.trace()) <= 1e-8 * n * inf_norm(A));
  }
}

TEST_CASE("sym_eig_smallest matches characteristic polynomial roots for small n") {
  for (Index n : {2, 3, 4}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Matrix A = testutil::random_symmetric(n, 31 * seed + n);
      const auto roots = charpoly_roots(A);
      const auto r = sym_eig_smallest(A, n);
      for (Index j = 0; j < n; ++j) CHECK(r.eigenvalues(j) == doctest::Approx(roots[j]).epsilon(1e-8));
    }
  }
}

TEST_CASE("sym_eig_smallest rejects bad input") {
  Matrix A = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(sym_eig_smallest(A, 0), InvalidArgument);
  CHECK_THROWS_AS(sym_eig_smallest(A, 4), InvalidArgument);
  A(0, 1) = 1.0;
  CHECK_THROWS_AS(sym_eig_smallest(A, 1), DataError);
  A(0, 1) = std::nan("");
  CHECK_THROWS_AS(sym_eig_smallest(A, 1), DataError);
}

TEST_CASE("symmetrized averages tiny asymmetry") {
  Matrix A = Matrix::Identity(2, 2);
  A(0, 1) = 1e-12;
  const Matrix S = symmetrized(A, "test");
  CHECK(S(0, 1) == S(1, 0));
  CHECK(S(0, 1) == doctest::Approx(5e-13));
}

TEST_CASE("thin_svd known singular values") {
  CHECK(thin_svd(Matrix::Identity(3, 3)).singular_values.isApprox(Vector::Ones(3)));
  Matrix D(2, 2);
  D << 3, 0, 0, 2;
  const auto r = thin_svd(D);
  CHECK(r.singular_values(0) == doctest::Approx(3.0));
  CHECK(r.singular_values(1) == doctest::Approx(2.0));
}

TEST_CASE("thin_svd reconstruction") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix A = gaussian_matrix(6, 4, seed);
    const auto r = thin_svd(A);
    REQUIRE(r.U.rows() == 6);
    REQUIRE(r.U.cols() == 4);
    REQUIRE(r.V.rows() == 4);
    const Matrix back = r.U * r.singular_values.asDiagonal() * r.V.transpose();
    REQUIRE((A - back).norm() <= 1e-10 * A.norm());
    for (Index j = 1; j < 4; ++j) REQUIRE(r.singular_values(j - 1) >= r.singular_values(j));
    REQUIRE(r.singular_values.minCoeff() >= 0.0);
  }
}

TEST_CASE("spd_solve small cases") {
  const Matrix b = gaussian_matrix(4, 1, 3);
  CHECK(testutil::max_abs_diff(spd_solve(2.0 * Matrix::Identity(4, 4), b), b / 2.0) <= 1e-15);
  Matrix A(2, 2);
  A << 2, 1, 1, 2;
  Matrix B(2, 1);
  B << 3, 3;
  const Matrix X = spd_solve(A, B);
  CHECK(X(0, 0) == doctest::Approx(1.0));
  CHECK(X(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("spd_solve residuals and explicit inverse") {
  for (Index n : {2, 5, 10, 20}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Matrix A = testutil::random_spd(n, seed + 7 * n);
      const Matrix B = gaussian_matrix(n, n, seed + 500);
      const Matrix X = spd_solve(A, B);
      REQUIRE((A * X - B).norm() <= 1e-8 * std::max(1.0, B.norm()));
      if (n <= 4) REQUIRE(testutil::max_abs_diff(X, A.inverse() * B) <= 1e-10);
    }
  }
}

TEST_CASE("spd_solve is bitwise deterministic") {
  const Matrix A = testutil::random_spd(10, 1);
  const Matrix B = gaussian_matrix(10, 10, 2);
  CHECK(spd_solve(A, B) == spd_solve(A, B));
}

TEST_CASE("spd_solve reports the failing pivot") {
  Matrix A = Matrix::Identity(3, 3);
  A(2, 2) = -1.0;
  try {
    spd_solve(A, Matrix::Ones(3, 1));
    FAIL("expected a factorization error");
  } catch (const FactorizationError& e) {
    CHECK(e.pivot() == 2);
  }
}

TEST_CASE("SpdFactorization inverse and column solves agree with solve") {
  const Matrix A = testutil::random_spd(12, 4);
  const SpdFactorization f(A);
  const Matrix B = gaussian_matrix(12, 5, 9);
  const Matrix X = f.solve(B);
  CHECK(testutil::max_abs_diff(f.inverse() * B, X) <= 1e-12);
  CHECK(f.inverse() == f.inverse().transpose());
  for (Index j = 0; j < 5; ++j) CHECK(testutil::max_abs_diff(f.solve_column(B.col(j)), X.col(j)) <= 1e-13);
}

TEST_CASE("orthonormalize returns the polar factor") {
  const Matrix A = gaussian_matrix(8, 3, 5);
  const Matrix Q = orthonormalize(A);
  CHECK(orthonormality_error(Q) <= 1e-12);
  // polar factor: Q^T A is symmetric positive definite
  const Matrix H = Q.transpose() * A;
  CHECK(symmetry_violation(H) <= 1e-12);
  CHECK(sym_eig_smallest(0.5 * (H + H.transpose()), 1).eigenvalues(0) > 0.0);
}
