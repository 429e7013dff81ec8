#pragma once

#include "unispec/spectral_embed.hpp"

#include <vector>

namespace unispec {

/// Orthogonal Procrustes step: the orthogonal Q minimizing ||F - P Q||_F.
/// With F^T P = U S V^T this is Q = V U^T, which makes F^T P Q = U S U^T
/// symmetric PSD (the optimality certificate).
Rotation update_Q(const IndicatorMatrix& F, const Embedding& P);

/// F_ij = 1 iff j = argmax_k (P Q)_ik; ties go to the lowest column.
IndicatorMatrix update_F(const Embedding& P, const Rotation& Q);

struct LabelVector {
  std::vector<int> labels;          // one per row of F, in [0, c)
  std::vector<int> empty_clusters;  // columns of F without any 1
};

/// Column index of the 1 in each row; throws DataError if a row is not one-hot.
LabelVector labels_of(const IndicatorMatrix& F);

/// One-hot n x c encoding of labels in [0, c).
IndicatorMatrix indicator_from_labels(const std::vector<int>& labels, Index c);

/// Seeded Haar-random c x c orthogonal matrix.
Rotation random_rotation(Index c, std::uint64_t seed);

}  // namespace unispec
