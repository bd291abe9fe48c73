#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hmvi/data_model.hpp"

namespace hmvi {

// Conditional behaviour of reflector attribute s given one condition value
// of attribute r, estimated over pairwise-complete rows.
struct ConditionalStats {
    std::vector<double> dist;  // categorical s: P(t | condition) over s's catalog
    double mean = 0.0;         // numerical s: conditional mean of normalized values
    std::size_t support = 0;   // co-observed row count; 0 flags zero support
};

struct CoOccurrenceStats {
    // cond[r][q][s]: reflector s given attribute r taking its q-th catalog value.
    std::vector<std::vector<std::vector<ConditionalStats>>> cond;
};

struct WeightMatrix {
    std::vector<std::vector<double>> w;  // d x d, w[r][s] >= 0

    double at(std::size_t r, std::size_t s) const { return w[r][s]; }
};

// Symmetric n x n object distances with zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        values_[i * n_ + j] = v;
        values_[j * n_ + i] = v;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

struct DissimilarityModel {
    Schema schema;
    ValueCatalog catalog;
    CoOccurrenceStats stats;
    WeightMatrix weights;
    // Per attribute: K x K row-major table of normalized pair
    // dissimilarities. Empty for numerical attributes, which use the
    // direct normalized-value difference instead.
    std::vector<std::vector<double>> pair_tables;
    std::vector<std::optional<NumericRange>> ranges;
    std::size_t zero_support_fallbacks = 0;

    // Fits statistics, weights and pair tables from the observed cells of
    // a numerically normalized dataset. The model is immutable afterwards.
    static DissimilarityModel fit(const Dataset& normalized, const ValueCatalog& catalog,
                                  std::vector<std::optional<NumericRange>> ranges = {});

    double pair_value(std::size_t attr, std::size_t q, std::size_t h) const {
        return pair_tables[attr][q * catalog.attrs[attr].size() + h];
    }
};

CoOccurrenceStats estimate_statistics(const Dataset& normalized, const ValueCatalog& catalog);

// Dissimilarity of attribute r's q-th and h-th catalog values as seen
// through reflector attribute s; always in [0,1]. Zero support on either
// condition yields 1 and bumps *fallbacks.
double psi_reflect(const CoOccurrenceStats& stats, const ValueCatalog& catalog,
                   const Schema& schema, std::size_t r, std::size_t s, std::size_t q,
                   std::size_t h, std::size_t* fallbacks = nullptr);

WeightMatrix compute_weights(const CoOccurrenceStats& stats, const ValueCatalog& catalog,
                             const Schema& schema, std::size_t* fallbacks = nullptr);

std::vector<std::vector<double>> value_pair_tables(const CoOccurrenceStats& stats,
                                                   const ValueCatalog& catalog,
                                                   const Schema& schema,
                                                   const WeightMatrix& weights,
                                                   std::size_t* fallbacks = nullptr);

// Missing-aware object distance over normalized rows. Complete pairs use
// the plain quadratic combination; pairs with md missing attributes scale
// the observed terms by d/(d-md); md = d returns sqrt(d).
double object_distance(const std::vector<CellValue>& a, const std::vector<CellValue>& b,
                       const DissimilarityModel& model);
double object_distance(const Dataset& ds, std::size_t i, std::size_t j,
                       const DissimilarityModel& model);

DistanceMatrix distance_matrix(const Dataset& ds, const DissimilarityModel& model);

// Recomputes row/column i in place after that row's cells changed.
void update_row(DistanceMatrix& matrix, const Dataset& ds, const DissimilarityModel& model,
                std::size_t i);

}  // namespace hmvi
