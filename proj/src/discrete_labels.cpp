#include "unispec/discrete_labels.hpp"

#include "unispec/errors.hpp"

#include <fmt/core.h>

#include <random>

namespace unispec {

Rotation update_Q(const IndicatorMatrix& F, const Embedding& P) {
  if (F.F.rows() != P.P.rows() || F.F.cols() != P.P.cols()) {
    throw InvalidArgument(fmt::format("update_Q: F is {}x{} but P is {}x{}", F.F.rows(),
                                      F.F.cols(), P.P.rows(), P.P.cols()));
  }
  const SvdResult svd = thin_svd(F.F.transpose() * P.P);
  return Rotation{svd.V * svd.U.transpose()};
}

IndicatorMatrix update_F(const Embedding& P, const Rotation& Q) {
  const Index c = P.P.cols();
  require_shape(Q.Q, c, c, "update_F rotation");
  const Matrix PQ = P.P * Q.Q;
  IndicatorMatrix out{Matrix::Zero(PQ.rows(), c)};
  for (Index i = 0; i < PQ.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < c; ++k)
      if (PQ(i, k) > PQ(i, best)) best = k;
    out.F(i, best) = 1.0;
  }
  return out;
}

LabelVector labels_of(const IndicatorMatrix& F) {
  const Index n = F.F.rows();
  const Index c = F.F.cols();
  LabelVector out;
  out.labels.resize(n);
  std::vector<long> counts(c, 0);
  for (Index i = 0; i < n; ++i) {
    int found = -1;
    for (Index k = 0; k < c; ++k) {
      const double v = F.F(i, k);
      if (v == 1.0 && found < 0) {
        found = static_cast<int>(k);
      } else if (v != 0.0) {
        throw DataError(fmt::format("labels_of: row {} is not one-hot", i));
      }
    }
    if (found < 0) throw DataError(fmt::format("labels_of: row {} has no 1", i));
    out.labels[i] = found;
    ++counts[found];
  }
  for (Index k = 0; k < c; ++k)
    if (counts[k] == 0) out.empty_clusters.push_back(static_cast<int>(k));
  return out;
}

IndicatorMatrix indicator_from_labels(const std::vector<int>& labels, Index c) {
  IndicatorMatrix out{Matrix::Zero(static_cast<Index>(labels.size()), c)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= c)
      throw InvalidArgument(fmt::format("label {} at position {} outside [0, {})", labels[i], i, c));
    out.F(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return out;
}

Rotation random_rotation(Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(c, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < c; ++i) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ();
  // fix column signs so the distribution is Haar
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < c; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Rotation{std::move(Q)};
}

}  // namespace unispec
