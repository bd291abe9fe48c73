#include "hmvi/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "hmvi/errors.hpp"

namespace hmvi {

namespace {

double assignment_cost(const DistanceMatrix& m, const std::vector<std::size_t>& medoids) {
    double cost = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c : medoids) best = std::min(best, m.at(i, c));
        cost += best;
    }
    return cost;
}

}  // namespace

std::size_t nearest_medoid(const DistanceMatrix& matrix, const ClusterModel& model,
                           std::size_t i) {
    std::size_t best = 0;
    double best_d = matrix.at(i, model.medoids[0]);
    for (std::size_t c = 1; c < model.medoids.size(); ++c) {
        double d = matrix.at(i, model.medoids[c]);
        if (d < best_d) {  // tie keeps the lower medoid index (medoids ascending)
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::size_t assign_object(const DistanceMatrix& matrix, ClusterModel& model, std::size_t i) {
    std::size_t c = nearest_medoid(matrix, model, i);
    model.assignment[i] = c;
    return c;
}

ClusterModel cluster(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed,
                     std::size_t max_iter) {
    const std::size_t n = matrix.size();
    if (k < 2 || k > n)
        throw DataError("cluster: k=" + std::to_string(k) + " out of range [2, " +
                        std::to_string(n) + "]");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(indices[i], indices[pick(rng)]);
    }
    std::vector<std::size_t> medoids(indices.begin(), indices.begin() + static_cast<long>(k));
    std::sort(medoids.begin(), medoids.end());

    double cost = assignment_cost(matrix, medoids);
    std::vector<bool> is_medoid(n, false);
    for (std::size_t c : medoids) is_medoid[c] = true;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double best_cost = cost;
        std::size_t best_slot = k, best_candidate = n;
        for (std::size_t slot = 0; slot < k; ++slot) {
            std::size_t old = medoids[slot];
            for (std::size_t h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                medoids[slot] = h;
                double c = assignment_cost(matrix, medoids);
                if (c < best_cost - 1e-12) {
                    best_cost = c;
                    best_slot = slot;
                    best_candidate = h;
                }
            }
            medoids[slot] = old;
        }
        if (best_slot == k) break;  // no improving swap
        is_medoid[medoids[best_slot]] = false;
        is_medoid[best_candidate] = true;
        medoids[best_slot] = best_candidate;
        std::sort(medoids.begin(), medoids.end());
        cost = best_cost;
    }

    ClusterModel model;
    model.medoids = std::move(medoids);
    model.assignment.resize(n);
    model.cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = nearest_medoid(matrix, model, i);
        model.assignment[i] = c;
        model.cost += matrix.at(i, model.medoids[c]);
    }
    return model;
}

double silhouette(const DistanceMatrix& matrix, const std::vector<std::size_t>& assignment) {
    const std::size_t n = matrix.size();
    if (assignment.size() != n) throw DataError("silhouette: label count mismatch");
    std::size_t k = 0;
    for (std::size_t a : assignment) k = std::max(k, a + 1);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assignment) sizes[a]++;
    std::size_t nonempty = 0;
    for (std::size_t s : sizes)
        if (s > 0) ++nonempty;
    if (nonempty < 2) throw DataError("silhouette: need at least 2 non-empty clusters");

    double total = 0.0;
    std::vector<double> mean_to(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(mean_to.begin(), mean_to.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) mean_to[assignment[j]] += matrix.at(i, j);
        std::size_t own = assignment[i];
        if (sizes[own] <= 1) continue;  // singleton contributes 0
        double a = mean_to[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || sizes[c] == 0) continue;
            b = std::min(b, mean_to[c] / static_cast<double>(sizes[c]));
        }
        double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

}  // namespace hmvi
