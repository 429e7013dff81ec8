#include "unispec/metrics.hpp"

#include "unispec/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace unispec {

namespace {

// Confusion counts with labels remapped to dense ids (sorted order).
struct Contingency {
  Matrix counts;  // predicted x truth
  Index n = 0;
};

std::vector<int> dense_ids(std::span<const int> labels, Index& k) {
  std::map<int, int> ids;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument(fmt::format("labels must be nonnegative, got {}", l));
    ids.emplace(l, 0);
  }
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  k = next;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

Contingency contingency(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgument(fmt::format("label vectors differ in length ({} predicted, {} truth)",
                                      predicted.size(), truth.size()));
  }
  if (predicted.empty()) throw InvalidArgument("label vectors are empty");
  Index kp = 0, kt = 0;
  const auto p = dense_ids(predicted, kp);
  const auto t = dense_ids(truth, kt);
  Contingency c;
  c.n = static_cast<Index>(predicted.size());
  c.counts = Matrix::Zero(kp, kt);
  for (std::size_t i = 0; i < p.size(); ++i) c.counts(p[i], t[i]) += 1.0;
  return c;
}

double entropy(const Vector& counts, double n) {
  double h = 0.0;
  for (Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0.0) {
      const double q = counts(i) / n;
      h -= q * std::log(q);
    }
  }
  return h;
}

}  // namespace

std::vector<Index> hungarian_min_cost(const Matrix& cost) {
  // Shortest augmenting path with potentials (1-based internally).
  const Index n = cost.rows();
  if (cost.cols() != n) throw InvalidArgument("hungarian_min_cost: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Index i0 = match[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> row_to_col(n);
  for (Index j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  const Contingency c = contingency(predicted, truth);
  const Index k = std::max(c.counts.rows(), c.counts.cols());
  // pad to square; maximize matches = minimize negated counts
  Matrix cost = Matrix::Zero(k, k);
  cost.topLeftCorner(c.counts.rows(), c.counts.cols()) = -c.counts;
  const auto assignment = hungarian_min_cost(cost);
  double matched = 0.0;
  for (Index i = 0; i < c.counts.rows(); ++i) {
    const Index j = assignment[i];
    if (j < c.counts.cols()) matched += c.counts(i, j);
  }
  return matched / static_cast<double>(c.n);
}

double nmi(std::span<const int> predicted, std::span<const int> truth, NmiNormalization norm) {
  const Contingency c = contingency(predicted, truth);
  const double n = static_cast<double>(c.n);
  const Vector rows = c.counts.rowwise().sum();
  const Vector cols = c.counts.colwise().sum().transpose();
  const bool single_p = c.counts.rows() == 1;
  const bool single_t = c.counts.cols() == 1;
  if (single_p || single_t) return (single_p && single_t) ? 1.0 : 0.0;

  double mi = 0.0;
  for (Index i = 0; i < c.counts.rows(); ++i)
    for (Index j = 0; j < c.counts.cols(); ++j) {
      const double nij = c.counts(i, j);
      if (nij > 0.0) mi += (nij / n) * std::log(n * nij / (rows(i) * cols(j)));
    }
  const double hp = entropy(rows, n);
  const double ht = entropy(cols, n);
  const double denom = norm == NmiNormalization::sqrt ? std::sqrt(hp * ht) : 0.5 * (hp + ht);
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double purity(std::span<const int> predicted, std::span<const int> truth) {
  const Contingency c = contingency(predicted, truth);
  return c.counts.rowwise().maxCoeff().sum() / static_cast<double>(c.n);
}

Index connected_components(const Matrix& Z, double threshold) {
  if (Z.rows() != Z.cols()) throw InvalidArgument("connected_components: Z must be square");
  if (!(threshold >= 0.0)) throw InvalidArgument("connected_components: threshold must be >= 0");
  require_finite(Z, "connected_components");
  const Index n = Z.rows();
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  Index components = n;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      if (0.5 * (Z(i, j) + Z(j, i)) > threshold) {
        const Index a = find(i), b = find(j);
        if (a != b) {
          parent[a] = b;
          --components;
        }
      }
    }
  return components;
}

}  // namespace unispec
