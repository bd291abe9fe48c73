#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmvi/data_model.hpp"
#include "hmvi/imputer.hpp"

namespace hmvi {

struct MissingMask {
    std::vector<std::pair<std::size_t, std::size_t>> cells;  // (row, column)
    double rate = 0.0;
    std::uint64_t seed = 0;
};

// Removes round(rate*n*d) uniformly sampled cells, never emptying a whole
// row or column. Deterministic under seed.
std::pair<Dataset, MissingMask> inject_missing(const Dataset& complete, double rate,
                                               std::uint64_t seed);

// RMS of per-cell imputation errors over the masked cells: numerical
// |diff|/range, nominal 0/1 mismatch, ordinal |rank diff|/(levels-1).
double mrmse(const Dataset& truth, const Dataset& imputed, const MissingMask& mask);

// Adjusted Rand index via the contingency-table formula.
double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

// Lloyd-style k-prototypes on a complete dataset: squared Euclidean cost
// on normalized numerics plus gamma per categorical mismatch (ordinal
// treated as categorical). gamma defaults to half the mean standard
// deviation of the normalized numeric columns.
std::vector<std::size_t> kprototypes(const Dataset& complete, std::size_t k, std::uint64_t seed,
                                     std::optional<double> gamma = std::nullopt);

struct MethodSpec {
    std::string name;  // hmvi | hmvi-0 | hmvi-1 | mms | knnmi
    Ablation ablation = Ablation::Full;

    static MethodSpec parse(const std::string& token);
};

struct GridCell {
    std::string method;
    double rate = 0.0;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    // mRMSE is absent for the ORI baseline rows.
    std::optional<double> mrmse;
    double ari = 0.0;
    double cvi = 0.0;
    double wall_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct AggregateRow {
    std::string method;
    double rate = 0.0;
    double mean_mrmse = 0.0;
    double mean_ari = 0.0;
    double mean_cvi = 0.0;
    std::size_t cells = 0;
};

struct ExperimentReport {
    std::vector<GridCell> grid;
    std::vector<AggregateRow> means;
    std::uint64_t base_seed = 0;
};

struct ExperimentConfig {
    std::vector<MethodSpec> methods;
    std::vector<double> rates{0.1, 0.2, 0.3, 0.4, 0.5};
    std::size_t repeats = 10;
    std::uint64_t base_seed = 0;
    std::size_t k = 2;
    HmviConfig hmvi;
};

// Full protocol: per (rate, repeat) inject with a derived seed, impute
// with every method, score mRMSE against the truth, cluster the imputed
// data with k-prototypes and score ARI + silhouette; ORI rows score the
// uncorrupted data. Sub-operation failures mark the cell, not the run.
ExperimentReport run_experiment(const Dataset& complete, const std::vector<int>& true_labels,
                                const ExperimentConfig& config);

std::uint64_t derive_seed(std::uint64_t base, double rate, std::size_t repeat);

std::string grid_csv(const ExperimentReport& report);
std::string means_csv(const ExperimentReport& report);

}  // namespace hmvi
