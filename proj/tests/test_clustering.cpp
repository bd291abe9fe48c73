#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "hmvi/clustering.hpp"
#include "hmvi/errors.hpp"
#include "test_support.hpp"

using namespace hmvi;
using test_support::matrix_1d;

namespace {

std::vector<double> two_blobs() {
    return {0, 1, 2, 3, 4, 100, 101, 102, 103, 104};
}

double assignment_cost(const DistanceMatrix& m, const std::vector<std::size_t>& medoids) {
    double cost = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t med : medoids) best = std::min(best, m.at(i, med));
        cost += best;
    }
    return cost;
}

// Exhaustive optimum over all C(n, 2) medoid pairs.
double brute_force_optimum(const DistanceMatrix& m) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
            best = std::min(best, assignment_cost(m, {a, b}));
    return best;
}

DistanceMatrix random_matrix(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    DistanceMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, unif(rng));
    return m;
}

}  // namespace

TEST_CASE("two well-separated blobs reach the exhaustive optimum") {
    DistanceMatrix m = matrix_1d(two_blobs());
    double optimum = brute_force_optimum(m);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ClusterModel model = cluster(m, 2, seed);
        CHECK(model.cost == doctest::Approx(optimum));
        // Blob membership must be pure.
        for (std::size_t i = 1; i < 5; ++i) CHECK(model.assignment[i] == model.assignment[0]);
        for (std::size_t i = 6; i < 10; ++i) CHECK(model.assignment[i] == model.assignment[5]);
        CHECK(model.assignment[0] != model.assignment[5]);
        CHECK(std::is_sorted(model.medoids.begin(), model.medoids.end()));
    }
}

TEST_CASE("k = n drives the cost to zero") {
    DistanceMatrix m = matrix_1d({1, 2, 3, 4});
    ClusterModel model = cluster(m, 4, 0);
    CHECK(model.cost == 0.0);
    CHECK(model.medoids == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("invalid k is rejected") {
    DistanceMatrix m = matrix_1d({1, 2, 3});
    CHECK_THROWS_AS(cluster(m, 1, 0), DataError);
    CHECK_THROWS_AS(cluster(m, 4, 0), DataError);
}

TEST_CASE("assignment ties go to the lower medoid object index") {
    // Object 1 sits exactly between medoid candidates 0 and 2.
    DistanceMatrix m = matrix_1d({0.0, 1.0, 2.0});
    ClusterModel model;
    model.medoids = {0, 2};
    model.assignment = {0, 0, 1};
    CHECK(nearest_medoid(m, model, 1) == 0);
    model.assignment[1] = 1;
    CHECK(assign_object(m, model, 1) == 0);
    CHECK(model.assignment[1] == 0);
}

TEST_CASE("cost never increases with more swap iterations") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        DistanceMatrix m = random_matrix(seed, 12);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t iters = 0; iters <= 5; ++iters) {
            double cost = cluster(m, 3, seed, iters).cost;
            CHECK(cost <= prev + 1e-12);
            prev = cost;
        }
    }
}

TEST_CASE("clustering is deterministic under a fixed seed") {
    DistanceMatrix m = random_matrix(123, 15);
    ClusterModel a = cluster(m, 3, 7);
    ClusterModel b = cluster(m, 3, 7);
    CHECK(a.medoids == b.medoids);
    CHECK(a.assignment == b.assignment);
    CHECK(a.cost == b.cost);
}

TEST_CASE("reported cost matches the assignment it ships with") {
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
        DistanceMatrix m = random_matrix(seed, 10);
        ClusterModel model = cluster(m, 2, seed);
        double recomputed = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i)
            recomputed += m.at(i, model.medoids[model.assignment[i]]);
        CHECK(model.cost == doctest::Approx(recomputed));
        for (std::size_t i = 0; i < m.size(); ++i)
            CHECK(model.assignment[i] == nearest_medoid(m, model, i));
    }
}

TEST_CASE("silhouette separates blobs and degrades gracefully") {
    DistanceMatrix blobs = matrix_1d(two_blobs());
    std::vector<std::size_t> labels{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(silhouette(blobs, labels) > 0.9);

    // Identical points: all pairwise distances zero -> 0/0 convention.
    DistanceMatrix zeros(4);
    CHECK(silhouette(zeros, {0, 0, 1, 1}) == 0.0);

    // Relabeling clusters does not change the score.
    std::vector<std::size_t> flipped{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    CHECK(silhouette(blobs, labels) == doctest::Approx(silhouette(blobs, flipped)));

    // Singletons contribute 0 rather than blowing up.
    DistanceMatrix three = matrix_1d({0.0, 0.1, 5.0});
    CHECK_NOTHROW(silhouette(three, {0, 0, 1}));

    CHECK_THROWS_AS(silhouette(blobs, std::vector<std::size_t>(10, 0)), DataError);
}
