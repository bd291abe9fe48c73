#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hmvi/metric.hpp"

namespace hmvi {

struct ClusterModel {
    std::vector<std::size_t> medoids;     // ascending object indices
    std::vector<std::size_t> assignment;  // per object: cluster index in [0, k)
    double cost = 0.0;                    // sum of object-to-medoid distances
};

// PAM-style k-medoids over a precomputed distance matrix: seeded random
// initial medoids, then repeatedly apply the single best cost-reducing
// (medoid, non-medoid) swap.
ClusterModel cluster(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed,
                     std::size_t max_iter = 100);

// Nearest medoid of object i, ties to the lower medoid object index.
std::size_t nearest_medoid(const DistanceMatrix& matrix, const ClusterModel& model,
                           std::size_t i);

// Reassigns object i in place and returns its cluster index.
std::size_t assign_object(const DistanceMatrix& matrix, ClusterModel& model, std::size_t i);

// Mean silhouette over all objects; singleton clusters contribute 0, as
// does the 0/0 case of identical points.
double silhouette(const DistanceMatrix& matrix, const std::vector<std::size_t>& assignment);

}  // namespace hmvi
