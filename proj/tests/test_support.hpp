#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hmvi/data_model.hpp"
#include "hmvi/metric.hpp"

namespace test_support {

using hmvi::CellValue;
using hmvi::Dataset;
using hmvi::Kind;

// Random tiny mixed dataset: d <= 3 columns of random kinds, n <= 12 rows,
// K <= 3 distinct values per column, optional missing cells. Every column
// keeps at least one observed cell.
inline Dataset random_tiny(std::uint64_t seed, double missing_rate = 0.2) {
    std::mt19937_64 rng(seed);
    auto randint = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Dataset ds;
    int d = randint(1, 3);
    int n = randint(3, 12);
    ds.n = static_cast<std::size_t>(n);
    ds.nominal_labels.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        int kind = randint(0, 2);
        hmvi::Column col;
        col.name = "c" + std::to_string(j);
        if (kind == 0) {
            col.kind.kind = Kind::Nominal;
            ds.nominal_labels[static_cast<std::size_t>(j)] = {"a", "b", "c"};
        } else if (kind == 1) {
            col.kind.kind = Kind::Ordinal;
            col.kind.levels = {"lo", "mid", "hi"};
        } else {
            col.kind.kind = Kind::Numerical;
        }
        ds.schema.columns.push_back(col);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            if (unif(rng) < missing_rate) {
                ds.cells.push_back(CellValue::missing());
                continue;
            }
            switch (ds.schema.columns[static_cast<std::size_t>(j)].kind.kind) {
                case Kind::Nominal:
                    ds.cells.push_back(CellValue::nominal(randint(0, 2)));
                    break;
                case Kind::Ordinal:
                    ds.cells.push_back(CellValue::ordinal(randint(0, 2)));
                    break;
                case Kind::Numerical:
                    // A 3-value pool keeps K <= 3 after binning.
                    ds.cells.push_back(CellValue::numeric(0.5 * randint(0, 2)));
                    break;
            }
        }
    }
    // Keep every column estimable.
    for (int j = 0; j < d; ++j) {
        bool any = false;
        for (int i = 0; i < n; ++i)
            if (!ds.cell(std::size_t(i), std::size_t(j)).is_missing()) any = true;
        if (!any) {
            CellValue v;
            switch (ds.schema.columns[std::size_t(j)].kind.kind) {
                case Kind::Nominal:
                    v = CellValue::nominal(0);
                    break;
                case Kind::Ordinal:
                    v = CellValue::ordinal(0);
                    break;
                case Kind::Numerical:
                    v = CellValue::numeric(0.0);
                    break;
            }
            ds.cell(0, std::size_t(j)) = v;
        }
    }
    return ds;
}

// 1-D numeric dataset from raw points (used for neighbor fixtures).
inline Dataset points_1d(const std::vector<double>& values) {
    Dataset ds;
    ds.schema.columns = {{"x", {Kind::Numerical, {}}}};
    ds.nominal_labels.resize(1);
    ds.n = values.size();
    for (double v : values) ds.cells.push_back(CellValue::numeric(v));
    return ds;
}

inline hmvi::DistanceMatrix matrix_1d(const std::vector<double>& values) {
    hmvi::DistanceMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            m.set(i, j, std::abs(values[i] - values[j]));
    return m;
}

}  // namespace test_support
