#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hmvi/clustering.hpp"
#include "hmvi/data_model.hpp"
#include "hmvi/metric.hpp"

namespace hmvi {

enum class RefreshPolicy { Full, Incremental };

enum class Ablation {
    Full,
    NoNaturalNeighbors,  // donors = whole containing cluster
    NoPreclustering,     // natural neighbors over the whole dataset
};

struct HmviConfig {
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t max_iter = 100;
    RefreshPolicy refresh = RefreshPolicy::Full;
    Ablation ablation = Ablation::Full;
    std::size_t knn_k = 5;  // KNNMI baseline only
};

struct ImputedCell {
    std::size_t row = 0;
    std::size_t col = 0;
    CellValue value;             // original scale
    std::size_t donor_count = 0;
    // Cluster index at fill time; npos when clustering is ablated.
    static constexpr std::size_t kNoCluster = static_cast<std::size_t>(-1);
    std::size_t cluster = kNoCluster;
};

struct ImputationReport {
    std::vector<ImputedCell> log;  // one entry per initially-missing cell
    std::size_t iterations = 0;    // outer targets processed
    std::vector<std::string> warnings;
};

struct HmviResult {
    Dataset dataset;        // complete, original scale
    ClusterModel clusters;  // final clustering of the completed data
    ImputationReport report;
};

HmviResult hmvi_impute(const Dataset& dataset, const HmviConfig& config);

// Missing attributes of `row`, strongest interdependence with the observed
// attributes first; score(r) = max over observed s of (w[r][s]+w[s][r])/2.
std::vector<std::size_t> order_missing_attributes(const std::vector<CellValue>& row,
                                                  const WeightMatrix& weights,
                                                  bool* degenerate = nullptr);

// Mean (numerical) or mode (categorical, ties to the lower catalog index)
// of the donors' observed values in `attr`. Donors lacking the attribute
// are skipped; at least one donor must remain.
CellValue impute_cell(const Dataset& ds, const ValueCatalog& catalog, std::size_t attr,
                      const std::vector<std::size_t>& donors);

Dataset mms_impute(const Dataset& dataset);

Dataset knnmi_impute(const Dataset& dataset, std::size_t knn_k,
                     std::vector<std::string>* warnings = nullptr);

}  // namespace hmvi
