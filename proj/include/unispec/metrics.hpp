#pragma once

#include "unispec/numerics.hpp"

#include <span>
#include <vector>

namespace unispec {

enum class NmiNormalization { sqrt, arithmetic };

/// Best fraction of agreeing points over one-to-one matchings of predicted
/// clusters to truth classes (Hungarian assignment on the confusion matrix).
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)) with natural logs, or divided by
/// the arithmetic mean of the entropies. A single-cluster side scores 0
/// unless both sides are single-cluster, which scores 1.
double nmi(std::span<const int> predicted, std::span<const int> truth,
           NmiNormalization norm = NmiNormalization::sqrt);

/// (1/n) * sum over predicted clusters of the largest overlap with a class.
double purity(std::span<const int> predicted, std::span<const int> truth);

/// Components of the undirected graph with edge (i,j) iff (z_ij + z_ji)/2 > threshold.
Index connected_components(const Matrix& Z, double threshold = 0.0);

/// Minimum-cost perfect assignment on a square cost matrix; returns the
/// column assigned to each row.
std::vector<Index> hungarian_min_cost(const Matrix& cost);

}  // namespace unispec
