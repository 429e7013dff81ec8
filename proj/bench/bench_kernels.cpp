// Serial reference vs OpenMP kernels. Run with --benchmark_filter=... to pick one.

#include "unispec/numerics.hpp"
#include "unispec/parallel_ops.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using unispec::Index;
using unispec::Matrix;

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = normal(rng);
  return A;
}

Matrix spd_matrix(Index n) {
  const Matrix A = random_matrix(n, n, 7);
  Matrix K = A.transpose() * A / static_cast<double>(n);
  K.diagonal().array() += 1.0;
  return K;
}

template <Matrix (*Fn)(const Matrix&)>
void BM_features(benchmark::State& state) {
  const Matrix X = random_matrix(32, state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(X));
}

template <Matrix (*Fn)(const Matrix&)>
void BM_rows(benchmark::State& state) {
  const Matrix P = random_matrix(state.range(0), 8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(P));
}

template <Matrix (*Fn)(const unispec::SpdFactorization&, const Matrix&)>
void BM_solve(benchmark::State& state) {
  const Index n = state.range(0);
  const unispec::SpdFactorization A(spd_matrix(n));
  const Matrix B = random_matrix(n, n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(A, B));
}

template <Matrix (*Fn)(const Matrix&, const Matrix&)>
void BM_multiply(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix M = spd_matrix(n);
  const Matrix B = random_matrix(n, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(M, B));
}

template <unispec::Assignment (*Fn)(const Matrix&, const Matrix&, std::span<const int>)>
void BM_assign(benchmark::State& state) {
  const Matrix points = random_matrix(state.range(0), 8, 5);
  const Matrix centers = random_matrix(10, 8, 6);
  const std::vector<int> current;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(points, centers, current));
}

}  // namespace

BENCHMARK(BM_features<unispec::serial::column_gram>)->Name("column_gram/serial")->Arg(200)->Arg(800);
BENCHMARK(BM_features<unispec::par::column_gram>)->Name("column_gram/par")->Arg(200)->Arg(800);
BENCHMARK(BM_features<unispec::serial::column_squared_distances>)
    ->Name("column_squared_distances/serial")->Arg(200)->Arg(800);
BENCHMARK(BM_features<unispec::par::column_squared_distances>)
    ->Name("column_squared_distances/par")->Arg(200)->Arg(800);
BENCHMARK(BM_rows<unispec::serial::row_squared_distances>)
    ->Name("row_squared_distances/serial")->Arg(200)->Arg(800);
BENCHMARK(BM_rows<unispec::par::row_squared_distances>)
    ->Name("row_squared_distances/par")->Arg(200)->Arg(800);
BENCHMARK(BM_solve<unispec::serial::solve_columns>)->Name("solve_columns/serial")->Arg(150)->Arg(400);
BENCHMARK(BM_solve<unispec::par::solve_columns>)->Name("solve_columns/par")->Arg(150)->Arg(400);
BENCHMARK(BM_multiply<unispec::serial::multiply_columns>)
    ->Name("multiply_columns/serial")->Arg(150)->Arg(400);
BENCHMARK(BM_multiply<unispec::par::multiply_columns>)
    ->Name("multiply_columns/par")->Arg(150)->Arg(400);
BENCHMARK(BM_assign<unispec::serial::assign_nearest>)
    ->Name("assign_nearest/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_assign<unispec::par::assign_nearest>)->Name("assign_nearest/par")->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
