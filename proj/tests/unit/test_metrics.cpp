#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "unispec/errors.hpp"
#include "unispec/metrics.hpp"
#include "unispec/spectral_embed.hpp"

#include <map>

using namespace unispec;

namespace {

std::vector<int> random_labels(std::size_t n, int c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, c - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = pick(rng);
  return out;
}

std::vector<int> relabel(const std::vector<int>& labels, const std::vector<int>& perm) {
  std::vector<int> out;
  for (int l : labels) out.push_back(perm[l]);
  return out;
}

// Mutual information and entropies from joint counts, natural logs.
double naive_nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1 / n;
    pb[b[i]] += 1 / n;
    pab[{a[i], b[i]}] += 1 / n;
  }
  double ha = 0, hb = 0, mi = 0;
  for (auto [k, p] : pa) ha -= p * std::log(p);
  for (auto [k, p] : pb) hb -= p * std::log(p);
  for (auto [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
  return mi / std::sqrt(ha * hb);
}

}  // namespace

TEST_CASE("accuracy of identical and relabeled predictions") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2, 2};
  CHECK(accuracy(truth, truth) == 1.0);
  CHECK(accuracy(relabel(truth, {2, 0, 1}), truth) == 1.0);
}

TEST_CASE("accuracy equals the exhaustive permutation maximum") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 2 + trial % 5;
    const auto truth = random_labels(40, c, rng);
    const auto pred = random_labels(40, c, rng);
    REQUIRE(accuracy(pred, truth) == testutil::brute_accuracy(pred, truth, c));
  }
}

TEST_CASE("accuracy pads unequal cluster counts") {
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> pred{0, 1, 2, 2};
  CHECK(accuracy(pred, truth) == 0.75);
}

TEST_CASE("nmi basics") {
  const std::vector<int> a{0, 0, 1, 1};
  CHECK(nmi(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nmi(std::vector<int>{0, 0, 0, 0}, a) == 0.0);
  CHECK(nmi(a, std::vector<int>{3, 3, 3, 3}) == 0.0);
  CHECK(nmi(std::vector<int>{1, 1, 1}, std::vector<int>{0, 0, 0}) == 1.0);
}

TEST_CASE("nmi matches the entropy formula and is symmetric") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_labels(50, 2 + trial % 4, rng);
    const auto b = random_labels(50, 2 + trial % 3, rng);
    CHECK(nmi(a, b) == doctest::Approx(naive_nmi(a, b)).epsilon(1e-12));
    CHECK(std::abs(nmi(a, b) - nmi(b, a)) <= 1e-12);
    CHECK(nmi(relabel(a, {4, 2, 0, 1, 3, 5}), b) == doctest::Approx(nmi(a, b)).epsilon(1e-12));
    const double arith = nmi(a, b, NmiNormalization::arithmetic);
    CHECK(arith >= 0.0);
    CHECK(arith <= nmi(a, b) + 1e-15);
  }
}

TEST_CASE("nmi of independent labelings is near zero") {
  std::mt19937_64 rng(3);
  const auto a = random_labels(10000, 3, rng);
  const auto b = random_labels(10000, 3, rng);
  CHECK(nmi(a, b) <= 0.1);
}

TEST_CASE("purity") {
  const std::vector<int> truth{0, 0, 0, 1};
  CHECK(purity(truth, truth) == 1.0);
  CHECK(purity(std::vector<int>{0, 1, 2, 3}, truth) == 1.0);
  CHECK(purity(std::vector<int>{0, 0, 1, 1}, truth) == 0.75);
}

TEST_CASE("metrics reject mismatched input") {
  CHECK_THROWS_AS(accuracy(std::vector<int>{0, 1}, std::vector<int>{0}), InvalidArgument);
  CHECK_THROWS_AS(nmi(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
  CHECK_THROWS_AS(purity(std::vector<int>{-1}, std::vector<int>{0}), InvalidArgument);
}

TEST_CASE("hungarian_min_cost against brute force") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 6;
    Matrix C(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) C(i, j) = u(rng);
    const auto assign = hungarian_min_cost(C);
    double got = 0;
    for (Index i = 0; i < n; ++i) got += C(i, assign[i]);
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double s = 0;
      for (Index i = 0; i < n; ++i) s += C(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("connected_components") {
  CHECK(connected_components(Matrix::Zero(5, 5)) == 5);
  Matrix Z = Matrix::Zero(9, 9);
  Z.block(0, 0, 2, 2).setOnes();
  Z.block(2, 2, 3, 3).setOnes();
  Z.block(5, 5, 4, 4).setOnes();
  CHECK(connected_components(Z) == 3);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix G = testutil::random_graph(12, seed);
    const double threshold = 0.85;
    const Index count = connected_components(G, threshold);
    Matrix T = G;
    for (Index i = 0; i < 12; ++i)
      for (Index j = 0; j < 12; ++j) T(i, j) = (G(i, j) + G(j, i)) / 2 > threshold ? 1.0 : 0.0;
    const auto ev = sym_eig_smallest(build_laplacian(T).L, 12).eigenvalues;
    Index zeros = 0;
    for (Index k = 0; k < 12; ++k)
      if (ev(k) < 1e-9) ++zeros;
    CHECK(count == zeros);
  }
}
