#include "hmvi/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmvi/errors.hpp"

namespace hmvi {

namespace {

// Per-row catalog index of each cell, -1 for missing.
std::vector<std::vector<int>> catalog_indices(const Dataset& ds, const ValueCatalog& catalog) {
    std::vector<std::vector<int>> idx(ds.n, std::vector<int>(ds.d()));
    for (std::size_t i = 0; i < ds.n; ++i)
        for (std::size_t j = 0; j < ds.d(); ++j)
            idx[i][j] = catalog.index_of(ds.schema, j, ds.cell(i, j));
    return idx;
}

}  // namespace

CoOccurrenceStats estimate_statistics(const Dataset& ds, const ValueCatalog& catalog) {
    const std::size_t d = ds.d();
    auto idx = catalog_indices(ds, catalog);

    CoOccurrenceStats stats;
    stats.cond.resize(d);
    for (std::size_t r = 0; r < d; ++r) {
        const std::size_t kr = catalog.attrs[r].size();
        stats.cond[r].assign(kr, std::vector<ConditionalStats>(d));
        for (std::size_t q = 0; q < kr; ++q)
            for (std::size_t s = 0; s < d; ++s)
                if (ds.schema.columns[s].kind.kind != Kind::Numerical)
                    stats.cond[r][q][s].dist.assign(catalog.attrs[s].size(), 0.0);
    }

    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t s = 0; s < d; ++s) {
            const bool numeric_s = ds.schema.columns[s].kind.kind == Kind::Numerical;
            for (std::size_t i = 0; i < ds.n; ++i) {
                int q = idx[i][r];
                if (q < 0 || idx[i][s] < 0) continue;  // pairwise-complete rows only
                ConditionalStats& cs = stats.cond[r][static_cast<std::size_t>(q)][s];
                cs.support++;
                if (numeric_s)
                    cs.mean += ds.cell(i, s).num;
                else
                    cs.dist[static_cast<std::size_t>(idx[i][s])] += 1.0;
            }
            for (std::size_t q = 0; q < catalog.attrs[r].size(); ++q) {
                ConditionalStats& cs = stats.cond[r][q][s];
                if (cs.support == 0) continue;
                if (numeric_s) {
                    cs.mean /= static_cast<double>(cs.support);
                } else {
                    for (double& p : cs.dist) p /= static_cast<double>(cs.support);
                }
            }
        }
    }
    return stats;
}

double psi_reflect(const CoOccurrenceStats& stats, const ValueCatalog& catalog,
                   const Schema& schema, std::size_t r, std::size_t s, std::size_t q,
                   std::size_t h, std::size_t* fallbacks) {
    const AttributeCatalog& ar = catalog.attrs[r];
    if (q >= ar.size() || h >= ar.size())
        throw DataError("psi_reflect: value index out of catalog range for attribute " +
                        std::to_string(r));
    if (q == h) return 0.0;

    if (s == r) {
        // Intrinsic dissimilarity of the two values themselves.
        switch (schema.columns[r].kind.kind) {
            case Kind::Nominal:
                return 1.0;
            case Kind::Ordinal: {
                double span = static_cast<double>(ar.size()) - 1.0;
                return span > 0 ? std::abs(static_cast<double>(q) - static_cast<double>(h)) / span
                                : 0.0;
            }
            case Kind::Numerical:
                return std::min(1.0, std::abs(ar.bin_means[q] - ar.bin_means[h]));
        }
    }

    const ConditionalStats& cq = stats.cond[r][q][s];
    const ConditionalStats& ch = stats.cond[r][h][s];
    if (cq.support == 0 || ch.support == 0) {
        if (fallbacks) ++(*fallbacks);
        return 1.0;
    }

    switch (schema.columns[s].kind.kind) {
        case Kind::Nominal: {
            double tv = 0.0;
            for (std::size_t t = 0; t < cq.dist.size(); ++t)
                tv += std::abs(cq.dist[t] - ch.dist[t]);
            return tv / 2.0;
        }
        case Kind::Ordinal: {
            const std::size_t ks = catalog.attrs[s].size();
            if (ks < 2) return 0.0;
            double l1 = 0.0, fq = 0.0, fh = 0.0;
            for (std::size_t t = 0; t + 1 < ks; ++t) {
                fq += cq.dist[t];
                fh += ch.dist[t];
                l1 += std::abs(fq - fh);
            }
            return l1 / (static_cast<double>(ks) - 1.0);
        }
        case Kind::Numerical:
            return std::min(1.0, std::abs(cq.mean - ch.mean));
    }
    throw InternalError("unreachable");
}

WeightMatrix compute_weights(const CoOccurrenceStats& stats, const ValueCatalog& catalog,
                             const Schema& schema, std::size_t* fallbacks) {
    const std::size_t d = schema.d();
    WeightMatrix wm;
    wm.w.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t r = 0; r < d; ++r) {
        const std::size_t kr = catalog.attrs[r].size();
        if (kr < 2) continue;  // no discriminating pairs
        const double pairs = static_cast<double>(kr) * (static_cast<double>(kr) - 1.0) / 2.0;
        const bool ordered = schema.columns[r].kind.kind != Kind::Nominal;
        for (std::size_t s = 0; s < d; ++s) {
            double sum = 0.0;
            for (std::size_t q = 0; q + 1 < kr; ++q) {
                for (std::size_t c = q + 1; c < kr; ++c) {
                    // Path correction: values on the inclusive rank path
                    // between the pair, minus one. Nominal values are all
                    // adjacent.
                    double path = ordered ? static_cast<double>(c - q) : 1.0;
                    sum += psi_reflect(stats, catalog, schema, r, s, q, c, fallbacks) / path;
                }
            }
            wm.w[r][s] = sum / pairs;
        }
    }
    return wm;
}

std::vector<std::vector<double>> value_pair_tables(const CoOccurrenceStats& stats,
                                                   const ValueCatalog& catalog,
                                                   const Schema& schema,
                                                   const WeightMatrix& weights,
                                                   std::size_t* fallbacks) {
    const std::size_t d = schema.d();
    std::vector<std::vector<double>> tables(d);
    for (std::size_t r = 0; r < d; ++r) {
        if (schema.columns[r].kind.kind == Kind::Numerical) continue;
        const std::size_t kr = catalog.attrs[r].size();
        std::vector<double> table(kr * kr, 0.0);
        double max_raw = 0.0;
        for (std::size_t q = 0; q < kr; ++q) {
            for (std::size_t h = q + 1; h < kr; ++h) {
                double raw = 0.0;
                for (std::size_t s = 0; s < d; ++s)
                    raw += psi_reflect(stats, catalog, schema, r, s, q, h, fallbacks) *
                           weights.w[r][s];
                table[q * kr + h] = raw;
                table[h * kr + q] = raw;
                max_raw = std::max(max_raw, raw);
            }
        }
        if (max_raw > 0.0)
            for (double& v : table) v /= max_raw;
        tables[r] = std::move(table);
    }
    return tables;
}

DissimilarityModel DissimilarityModel::fit(const Dataset& normalized, const ValueCatalog& catalog,
                                           std::vector<std::optional<NumericRange>> ranges) {
    DissimilarityModel model;
    model.schema = normalized.schema;
    model.catalog = catalog;
    model.ranges = std::move(ranges);
    if (model.ranges.empty()) model.ranges.resize(normalized.d());
    model.stats = estimate_statistics(normalized, catalog);
    model.weights =
        compute_weights(model.stats, catalog, model.schema, &model.zero_support_fallbacks);
    model.pair_tables = value_pair_tables(model.stats, catalog, model.schema, model.weights,
                                          &model.zero_support_fallbacks);
    return model;
}

double object_distance(const std::vector<CellValue>& a, const std::vector<CellValue>& b,
                       const DissimilarityModel& model) {
    const std::size_t d = model.schema.d();
    std::size_t md = 0;
    double sum = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        if (a[r].is_missing() || b[r].is_missing()) {
            ++md;
            continue;
        }
        double term;
        if (model.schema.columns[r].kind.kind == Kind::Numerical) {
            term = std::abs(a[r].num - b[r].num);
        } else {
            int qa = model.catalog.index_of(model.schema, r, a[r]);
            int qb = model.catalog.index_of(model.schema, r, b[r]);
            term = model.pair_value(r, static_cast<std::size_t>(qa), static_cast<std::size_t>(qb));
        }
        sum += term * term;
    }
    if (md == d) return std::sqrt(static_cast<double>(d));
    if (md == 0) return std::sqrt(sum);
    return std::sqrt(sum * static_cast<double>(d) / static_cast<double>(d - md));
}

double object_distance(const Dataset& ds, std::size_t i, std::size_t j,
                       const DissimilarityModel& model) {
    return object_distance(ds.row(i), ds.row(j), model);
}

DistanceMatrix distance_matrix(const Dataset& ds, const DissimilarityModel& model) {
    DistanceMatrix m(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        auto ri = ds.row(i);
        for (std::size_t j = i + 1; j < ds.n; ++j)
            m.set(i, j, object_distance(ri, ds.row(j), model));
    }
    return m;
}

void update_row(DistanceMatrix& matrix, const Dataset& ds, const DissimilarityModel& model,
                std::size_t i) {
    if (i >= matrix.size()) throw DataError("update_row: row index out of range");
    auto ri = ds.row(i);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
        if (j == i) continue;
        matrix.set(i, j, object_distance(ri, ds.row(j), model));
    }
}

}  // namespace hmvi
