#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hmvi/errors.hpp"
#include "hmvi/metric.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

using namespace hmvi;

namespace {

Dataset two_column(const std::string& schema_text, const std::string& csv) {
    return load_dataset(csv, parse_schema(schema_text));
}

}  // namespace

TEST_CASE("conditional distributions come from pairwise-complete rows") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,u\nb,v\nb,v\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    // P(u|a) = 1, P(u|b) = 0
    CHECK(stats.cond[0][0][1].dist[0] == doctest::Approx(1.0));
    CHECK(stats.cond[0][1][1].dist[0] == doctest::Approx(0.0));
    CHECK(stats.cond[0][0][1].support == 2);

    Dataset ds2 = two_column("r:nominal\ns:nominal", "a,u\na,u\nb,?\nb,v\n");
    ValueCatalog cat2 = catalog_values(ds2);
    CoOccurrenceStats stats2 = estimate_statistics(ds2, cat2);
    // P(.|b) estimated from the single co-observed row.
    CHECK(stats2.cond[0][1][1].support == 1);
    CHECK(stats2.cond[0][1][1].dist[1] == doctest::Approx(1.0));
}

TEST_CASE("zero co-observed rows flag zero support rather than erroring") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,v\nb,?\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    CHECK(stats.cond[0][1][1].support == 0);
}

TEST_CASE("psi_reflect: total variation, identity, identical CDFs") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,u\nb,v\nb,v\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    CHECK(psi_reflect(stats, cat, ds.schema, 0, 1, 0, 1) == doctest::Approx(1.0));
    CHECK(psi_reflect(stats, cat, ds.schema, 0, 1, 0, 0) == 0.0);

    // Ordinal reflector with identical conditionals.
    Dataset ds2 = two_column("r:nominal\ns:ordinal:lo<mid<hi", "a,lo\na,hi\nb,lo\nb,hi\n");
    ValueCatalog cat2 = catalog_values(ds2);
    CoOccurrenceStats stats2 = estimate_statistics(ds2, cat2);
    CHECK(psi_reflect(stats2, cat2, ds2.schema, 0, 1, 0, 1) == doctest::Approx(0.0));
}

TEST_CASE("psi_reflect falls back to 1 on zero support and counts it") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,v\nb,?\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    std::size_t fallbacks = 0;
    CHECK(psi_reflect(stats, cat, ds.schema, 0, 1, 0, 1, &fallbacks) == 1.0);
    CHECK(fallbacks == 1);
}

TEST_CASE("psi_reflect rejects out-of-catalog value indices") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\nb,v\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    CHECK_THROWS_AS(psi_reflect(stats, cat, ds.schema, 0, 1, 0, 5), DataError);
}

TEST_CASE("weights: perfectly coupled binary pair gives w=1") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,u\nb,v\nb,v\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    WeightMatrix w = compute_weights(stats, cat, ds.schema);
    // K=2: one pair, psi=1, L=1, N=1.
    CHECK(w.at(0, 1) == doctest::Approx(1.0));
    CHECK(w.at(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("weights: exactly balanced independent attributes give w=0") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,v\nb,u\nb,v\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    WeightMatrix w = compute_weights(stats, cat, ds.schema);
    CHECK(w.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("weights: ordinal path correction halves the far pair") {
    // r ordinal with 3 levels; reflector s couples only the extremes, so
    // psi(lo,hi) = 1, psi(lo,mid) = psi(mid,hi) = 1 for a deterministic
    // coupling; the far pair is divided by its path length of 2.
    Dataset ds = two_column("r:ordinal:lo<mid<hi\ns:nominal",
                            "lo,u\nlo,u\nmid,v\nmid,v\nhi,w\nhi,w\n");
    ValueCatalog cat = catalog_values(ds);
    CoOccurrenceStats stats = estimate_statistics(ds, cat);
    WeightMatrix w = compute_weights(stats, cat, ds.schema);
    // pairs: (0,1) psi=1 path 1, (0,2) psi=1 path 2, (1,2) psi=1 path 1
    // w = (1 + 0.5 + 1) / 3
    CHECK(w.at(0, 1) == doctest::Approx(2.5 / 3.0));
}

TEST_CASE("single-valued attribute carries zero weight everywhere") {
    Dataset ds = two_column("r:nominal\ns:nominal", "a,u\na,v\n");
    ValueCatalog cat = catalog_values(ds);
    WeightMatrix w = compute_weights(estimate_statistics(ds, cat), cat, ds.schema);
    CHECK(w.at(0, 0) == 0.0);
    CHECK(w.at(0, 1) == 0.0);
}

TEST_CASE("pair tables are symmetric, zero-diagonal and within [0,1]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dataset ds = test_support::random_tiny(seed);
        NormalizedDataset norm = normalize_numeric(ds);
        ValueCatalog cat = catalog_values(norm.dataset);
        DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);
        for (std::size_t r = 0; r < ds.d(); ++r) {
            if (model.pair_tables[r].empty()) continue;
            std::size_t k = cat.attrs[r].size();
            for (std::size_t q = 0; q < k; ++q) {
                CHECK(model.pair_value(r, q, q) == 0.0);
                for (std::size_t h = 0; h < k; ++h) {
                    CHECK(model.pair_value(r, q, h) == model.pair_value(r, h, q));
                    CHECK(model.pair_value(r, q, h) >= 0.0);
                    CHECK(model.pair_value(r, q, h) <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("pair table reduces to the indicator when only the intrinsic term remains") {
    // A single nominal column: the only reflector is the attribute itself.
    Dataset ds = load_dataset("a\nb\na\nb\n", parse_schema("r:nominal"));
    ValueCatalog cat = catalog_values(ds);
    DissimilarityModel model = DissimilarityModel::fit(ds, cat);
    CHECK(model.pair_value(0, 0, 1) == doctest::Approx(1.0));
    CHECK(model.pair_value(0, 0, 0) == 0.0);
}

TEST_CASE("object_distance basics") {
    Dataset ds = two_column("n:numerical\nc:nominal", "0,a\n1,b\n0,a\n?,?\n0.5,?\n");
    NormalizedDataset norm = normalize_numeric(ds);
    ValueCatalog cat = catalog_values(norm.dataset);
    DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);

    CHECK(object_distance(norm.dataset, 0, 2, model) == 0.0);  // identical complete rows
    // Fully-missing vs fully-missing row pair -> sqrt(d).
    Dataset both = norm.dataset;
    both.cell(4, 0) = CellValue::missing();
    CHECK(object_distance(both, 3, 4, model) == doctest::Approx(std::sqrt(2.0)));
    // One observed attribute with dissimilarity 0.5 at d=2 -> sqrt(2*0.25).
    CHECK(object_distance(norm.dataset, 0, 4, model) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("complete rows use the unscaled quadratic combination") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        Dataset ds = test_support::random_tiny(seed, 0.0);
        NormalizedDataset norm = normalize_numeric(ds);
        ValueCatalog cat = catalog_values(norm.dataset);
        DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);
        for (std::size_t i = 0; i < ds.n; ++i)
            for (std::size_t j = 0; j < ds.n; ++j) {
                double sum = 0.0;
                for (std::size_t r = 0; r < ds.d(); ++r) {
                    double term;
                    const CellValue& a = norm.dataset.cell(i, r);
                    const CellValue& b = norm.dataset.cell(j, r);
                    if (ds.schema.columns[r].kind.kind == Kind::Numerical)
                        term = std::abs(a.num - b.num);
                    else
                        term = model.pair_value(
                            r, std::size_t(cat.index_of(ds.schema, r, a)),
                            std::size_t(cat.index_of(ds.schema, r, b)));
                    sum += term * term;
                }
                CHECK(object_distance(norm.dataset, i, j, model) ==
                      doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
            }
    }
}

TEST_CASE("object_distance is symmetric, non-negative, zero on identity") {
    for (std::uint64_t seed = 200; seed < 220; ++seed) {
        Dataset ds = test_support::random_tiny(seed, 0.3);
        NormalizedDataset norm = normalize_numeric(ds);
        ValueCatalog cat = catalog_values(norm.dataset);
        DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);
        for (std::size_t i = 0; i < ds.n; ++i)
            for (std::size_t j = 0; j < ds.n; ++j) {
                double dij = object_distance(norm.dataset, i, j, model);
                CHECK(dij == object_distance(norm.dataset, j, i, model));
                CHECK(dij >= 0.0);
            }
    }
}

TEST_CASE("distance_matrix matches entrywise recomputation") {
    Dataset ds = test_support::random_tiny(42, 0.2);
    NormalizedDataset norm = normalize_numeric(ds);
    ValueCatalog cat = catalog_values(norm.dataset);
    DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);
    DistanceMatrix m = distance_matrix(norm.dataset, model);
    for (std::size_t i = 0; i < ds.n; ++i) {
        CHECK(m.at(i, i) == 0.0);
        for (std::size_t j = 0; j < ds.n; ++j)
            CHECK(m.at(i, j) == doctest::Approx(object_distance(norm.dataset, i, j, model)));
    }
}

TEST_CASE("distance_matrix handles n=1 and duplicated rows") {
    Dataset one = load_dataset("3.5\n", parse_schema("n:numerical"));
    NormalizedDataset n1 = normalize_numeric(one);
    ValueCatalog c1 = catalog_values(n1.dataset);
    DissimilarityModel m1 = DissimilarityModel::fit(n1.dataset, c1, n1.ranges);
    DistanceMatrix d1 = distance_matrix(n1.dataset, m1);
    CHECK(d1.size() == 1);
    CHECK(d1.at(0, 0) == 0.0);

    Dataset dup = load_dataset("1,a\n2,b\n1,a\n", parse_schema("n:numerical\nc:nominal"));
    NormalizedDataset n2 = normalize_numeric(dup);
    ValueCatalog c2 = catalog_values(n2.dataset);
    DissimilarityModel m2 = DissimilarityModel::fit(n2.dataset, c2, n2.ranges);
    CHECK(distance_matrix(n2.dataset, m2).at(0, 2) == 0.0);
}

TEST_CASE("update_row equals full recomputation") {
    Dataset ds = test_support::random_tiny(55, 0.3);
    NormalizedDataset norm = normalize_numeric(ds);
    ValueCatalog cat = catalog_values(norm.dataset);
    DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);
    DistanceMatrix m = distance_matrix(norm.dataset, model);

    DistanceMatrix unchanged = m;
    update_row(unchanged, norm.dataset, model, 0);
    for (std::size_t i = 0; i < ds.n; ++i)
        for (std::size_t j = 0; j < ds.n; ++j) CHECK(unchanged.at(i, j) == m.at(i, j));

    // Fill one missing cell, then compare the incremental row update with
    // a from-scratch matrix.
    Dataset changed = norm.dataset;
    bool mutated = false;
    for (std::size_t j = 0; j < ds.d() && !mutated; ++j)
        if (changed.cell(1, j).is_missing()) {
            changed.cell(1, j) = cat.value_at(ds.schema, j, 0);
            mutated = true;
        }
    if (mutated) {
        update_row(m, changed, model, 1);
        DistanceMatrix fresh = distance_matrix(changed, model);
        for (std::size_t i = 0; i < ds.n; ++i)
            for (std::size_t j = 0; j < ds.n; ++j) CHECK(m.at(i, j) == fresh.at(i, j));
    }

    CHECK_THROWS_AS(update_row(m, norm.dataset, model, ds.n), DataError);
}

TEST_CASE("tiny datasets match the exhaustive oracle") {
    for (std::uint64_t seed = 300; seed < 312; ++seed) {
        Dataset ds = test_support::random_tiny(seed, 0.25);
        NormalizedDataset norm = normalize_numeric(ds);
        ValueCatalog cat = catalog_values(norm.dataset);
        DissimilarityModel model = DissimilarityModel::fit(norm.dataset, cat, norm.ranges);
        for (std::size_t r = 0; r < ds.d(); ++r) {
            for (std::size_t s = 0; s < ds.d(); ++s)
                CHECK(model.weights.at(r, s) ==
                      doctest::Approx(oracle::weight(norm.dataset, cat, r, s)).epsilon(1e-9));
            auto table = oracle::pair_table(norm.dataset, cat, r);
            if (table.empty()) continue;
            std::size_t k = cat.attrs[r].size();
            for (std::size_t q = 0; q < k; ++q)
                for (std::size_t h = 0; h < k; ++h)
                    CHECK(model.pair_value(r, q, h) ==
                          doctest::Approx(table[q * k + h]).epsilon(1e-9));
        }
        for (std::size_t i = 0; i < ds.n; ++i)
            for (std::size_t j = i; j < ds.n; ++j)
                CHECK(object_distance(norm.dataset, i, j, model) ==
                      doctest::Approx(oracle::object_distance(norm.dataset, cat, i, j))
                          .epsilon(1e-9));
    }
}
