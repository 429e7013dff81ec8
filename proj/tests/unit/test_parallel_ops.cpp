#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "unispec/parallel_ops.hpp"

#include <omp.h>

using namespace unispec;
using testutil::gaussian_matrix;

TEST_CASE("column kernels match the definitions") {
  const Matrix X = gaussian_matrix(4, 9, 1);
  const Matrix G = par::column_gram(X);
  const Matrix D = par::column_squared_distances(X);
  for (Index i = 0; i < 9; ++i) {
    for (Index j = 0; j < 9; ++j) {
      CHECK(G(i, j) == doctest::Approx(X.col(i).dot(X.col(j))).epsilon(1e-13));
      CHECK(D(i, j) == doctest::Approx((X.col(i) - X.col(j)).squaredNorm()).epsilon(1e-12));
    }
    CHECK(D(i, i) == 0.0);
  }
}

TEST_CASE("par and serial kernels are bit-identical for any thread count") {
  const Matrix X = gaussian_matrix(7, 130, 2);
  const Matrix P = gaussian_matrix(130, 4, 3);
  const Matrix A = testutil::random_spd(130, 4);
  const SpdFactorization f(A);
  const Matrix B = gaussian_matrix(130, 77, 5);
  const Matrix centers = gaussian_matrix(5, 4, 6);
  const std::vector<int> none;

  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);
    CHECK(par::column_gram(X) == serial::column_gram(X));
    CHECK(par::column_squared_distances(X) == serial::column_squared_distances(X));
    CHECK(par::row_squared_distances(P) == serial::row_squared_distances(P));
    CHECK(par::solve_columns(f, B) == serial::solve_columns(f, B));
    CHECK(par::multiply_columns(A, B) == serial::multiply_columns(A, B));
    const auto a = par::assign_nearest(P, centers, none);
    const auto b = serial::assign_nearest(P, centers, none);
    CHECK(a.labels == b.labels);
    CHECK(a.distances == b.distances);
    CHECK(a.changed == b.changed);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("solve_columns satisfies every column system") {
  const Matrix A = testutil::random_spd(40, 8);
  const Matrix B = gaussian_matrix(40, 70, 9);
  const Matrix X = par::solve_columns(SpdFactorization(A), B);
  CHECK((A * X - B).norm() <= 1e-10 * B.norm());
}

TEST_CASE("assign_nearest tie keeps the current label") {
  Matrix points(1, 1);
  points << 0.0;
  Matrix centers(2, 1);
  centers << -1.0, 1.0;
  CHECK(serial::assign_nearest(points, centers, std::vector<int>{}).labels[0] == 0);
  const std::vector<int> current{1};
  const auto r = par::assign_nearest(points, centers, current);
  CHECK(r.labels[0] == 1);
  CHECK(r.changed == 0);
  CHECK(r.distances[0] == 1.0);
}

TEST_CASE("max_threads is positive") { CHECK(max_threads() >= 1); }
