#pragma once

#include <cstddef>
#include <vector>

#include "hmvi/metric.hpp"

namespace hmvi {

struct NaNState {
    std::size_t lambda = 0;  // terminating search round
    // Per object: mutual-neighbor set at termination, ascending indices.
    std::vector<std::vector<std::size_t>> nan_sets;
    // Per object: reverse lambda-NN count at termination.
    std::vector<std::size_t> rnn_counts;
};

// The r nearest objects to i, distance-ascending, ties to the lower index.
std::vector<std::size_t> knn(const DistanceMatrix& matrix, std::size_t i, std::size_t r);

// Grows the neighbor radius round by round until every object has a
// mutual neighbor (or the uncovered count stops shrinking).
NaNState natural_neighbor_search(const DistanceMatrix& matrix);

// Natural neighbors of i restricted to `members`. Falls back to the
// lambda nearest members when the restricted search leaves i uncovered.
// |members| < 2 yields an empty set with *degenerate set.
std::vector<std::size_t> natural_neighbors_within(const DistanceMatrix& matrix,
                                                  const std::vector<std::size_t>& members,
                                                  std::size_t i, bool* degenerate = nullptr);

}  // namespace hmvi
