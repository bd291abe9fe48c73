#include "hmvi/neighbors.hpp"

#include <algorithm>
#include <string>

#include "hmvi/errors.hpp"

namespace hmvi {

namespace {

// Neighbor order of every object: indices sorted by (distance, index).
std::vector<std::vector<std::size_t>> neighbor_orders(const DistanceMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i].reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order[i].push_back(j);
        std::sort(order[i].begin(), order[i].end(), [&](std::size_t a, std::size_t b) {
            double da = m.at(i, a), db = m.at(i, b);
            return da < db || (da == db && a < b);
        });
    }
    return order;
}

}  // namespace

std::vector<std::size_t> knn(const DistanceMatrix& matrix, std::size_t i, std::size_t r) {
    const std::size_t n = matrix.size();
    if (i >= n) throw DataError("knn: object index out of range");
    if (r < 1 || r > n - 1)
        throw DataError("knn: neighbor count " + std::to_string(r) + " out of range [1, " +
                        std::to_string(n - 1) + "]");
    std::vector<std::size_t> order;
    order.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(r), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          double da = matrix.at(i, a), db = matrix.at(i, b);
                          return da < db || (da == db && a < b);
                      });
    order.resize(r);
    return order;
}

// Round r widens every object's neighborhood to its r nearest. Object i's
// nearest-neighbor bond to m_i activates once i enters m_i's neighborhood;
// the search stops at the first round where every object carries an active
// bond, or where the uncovered count stops shrinking.
NaNState natural_neighbor_search(const DistanceMatrix& matrix) {
    const std::size_t n = matrix.size();
    if (n < 2) throw DataError("natural_neighbor_search: need at least 2 objects");

    auto order = neighbor_orders(matrix);
    std::vector<std::vector<std::size_t>> rank(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < order[i].size(); ++p) rank[i][order[i][p]] = p;

    std::vector<std::size_t> nearest(n), active_round(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = order[i][0];
        active_round[i] = rank[nearest[i]][i] + 1;
    }

    std::size_t lambda = n - 1;
    std::size_t prev = n;  // round 0: nobody covered
    for (std::size_t r = 1; r <= n - 1; ++r) {
        std::size_t uncovered = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (active_round[i] > r) ++uncovered;
        if (uncovered == 0 || uncovered == prev) {
            lambda = r;
            break;
        }
        prev = uncovered;
    }

    NaNState state;
    state.lambda = lambda;
    state.nan_sets.resize(n);
    state.rnn_counts.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (active_round[i] <= lambda) {
            state.nan_sets[i].push_back(nearest[i]);
            state.nan_sets[nearest[i]].push_back(i);
        }
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && rank[j][i] < lambda) state.rnn_counts[i]++;
    }
    for (auto& s : state.nan_sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return state;
}

std::vector<std::size_t> natural_neighbors_within(const DistanceMatrix& matrix,
                                                  const std::vector<std::size_t>& members,
                                                  std::size_t i, bool* degenerate) {
    if (degenerate) *degenerate = false;
    if (members.size() < 2) {
        if (degenerate) *degenerate = true;
        return {};
    }
    auto pos = std::find(members.begin(), members.end(), i);
    if (pos == members.end())
        throw DataError("natural_neighbors_within: object not in member set");
    std::size_t local_i = static_cast<std::size_t>(pos - members.begin());

    DistanceMatrix sub(members.size());
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            sub.set(a, b, matrix.at(members[a], members[b]));

    NaNState state = natural_neighbor_search(sub);
    std::vector<std::size_t> local = state.nan_sets[local_i];
    if (local.empty()) {
        // Outliers can end the search uncovered; fall back to the lambda
        // nearest members so every target has references.
        std::size_t r = std::min(state.lambda, members.size() - 1);
        local = knn(sub, local_i, r);
    }
    std::vector<std::size_t> out;
    out.reserve(local.size());
    for (std::size_t l : local) out.push_back(members[l]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hmvi
