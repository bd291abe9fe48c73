#include "hmvi/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "hmvi/clustering.hpp"
#include "hmvi/errors.hpp"
#include "hmvi/metric.hpp"

namespace hmvi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, double rate, std::size_t repeat) {
    std::uint64_t r = static_cast<std::uint64_t>(std::llround(rate * 10000.0));
    return splitmix64(splitmix64(base ^ (r << 20)) ^ repeat);
}

std::pair<Dataset, MissingMask> inject_missing(const Dataset& complete, double rate,
                                               std::uint64_t seed) {
    if (!(rate > 0.0 && rate < 1.0)) throw DataError("inject_missing: rate must be in (0, 1)");
    if (!complete.complete()) throw DataError("inject_missing: dataset already has missing cells");

    const std::size_t n = complete.n, d = complete.d();
    const std::size_t target = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n * d)));

    MissingMask mask;
    mask.rate = rate;
    mask.seed = seed;
    Dataset out = complete;
    if (target == 0) return {out, mask};

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    candidates.reserve(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) candidates.emplace_back(i, j);

    std::vector<std::size_t> row_left(n, d), col_left(d, n);
    std::mt19937_64 rng(seed);
    while (mask.cells.size() < target && !candidates.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        std::size_t p = pick(rng);
        auto [i, j] = candidates[p];
        candidates[p] = candidates.back();
        candidates.pop_back();
        // A cell that would empty its row or column can never become
        // eligible later; drop it for good.
        if (row_left[i] <= 1 || col_left[j] <= 1) continue;
        row_left[i]--;
        col_left[j]--;
        out.cell(i, j) = CellValue::missing();
        mask.cells.emplace_back(i, j);
    }
    if (mask.cells.size() < target)
        throw DataError("inject_missing: rate " + std::to_string(rate) +
                        " infeasible under row/column non-emptiness constraints");
    return {out, mask};
}

double mrmse(const Dataset& truth, const Dataset& imputed, const MissingMask& mask) {
    if (!truth.complete() || !imputed.complete())
        throw DataError("mrmse: both datasets must be complete");
    if (truth.n != imputed.n || truth.d() != imputed.d())
        throw DataError("mrmse: dataset shapes differ");
    if (mask.cells.empty()) throw DataError("mrmse: empty mask");

    // Truth-column ranges for range-normalized numeric errors.
    std::vector<double> lo(truth.d(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(truth.d(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < truth.n; ++i)
        for (std::size_t j = 0; j < truth.d(); ++j)
            if (truth.schema.columns[j].kind.kind == Kind::Numerical) {
                lo[j] = std::min(lo[j], truth.cell(i, j).num);
                hi[j] = std::max(hi[j], truth.cell(i, j).num);
            }

    double sum_sq = 0.0;
    for (auto [i, j] : mask.cells) {
        const CellValue& t = truth.cell(i, j);
        const CellValue& x = imputed.cell(i, j);
        double e = 0.0;
        switch (truth.schema.columns[j].kind.kind) {
            case Kind::Numerical: {
                double range = hi[j] - lo[j];
                e = range > 0.0 ? std::abs(x.num - t.num) / range : 0.0;
                e = std::min(e, 1.0);
                break;
            }
            case Kind::Nominal:
                e = (x == t) ? 0.0 : 1.0;
                break;
            case Kind::Ordinal: {
                double span = static_cast<double>(truth.schema.columns[j].kind.levels.size()) - 1.0;
                e = span > 0.0 ? std::abs(static_cast<double>(x.id - t.id)) / span : 0.0;
                break;
            }
        }
        sum_sq += e * e;
    }
    return std::sqrt(sum_sq / static_cast<double>(mask.cells.size()));
}

double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size()) throw DataError("ari: label length mismatch");
    if (labels_a.size() < 2) throw DataError("ari: need at least 2 objects");
    const double n = static_cast<double>(labels_a.size());

    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> row_sum, col_sum;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        joint[{labels_a[i], labels_b[i]}] += 1.0;
        row_sum[labels_a[i]] += 1.0;
        col_sum[labels_b[i]] += 1.0;
    }
    auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, m] : joint) sum_ij += choose2(m);
    for (const auto& [key, m] : row_sum) sum_a += choose2(m);
    for (const auto& [key, m] : col_sum) sum_b += choose2(m);
    double total = choose2(n);
    double expected = sum_a * sum_b / total;
    double max_index = (sum_a + sum_b) / 2.0;
    if (max_index == expected) return 0.0;  // both partitions trivial
    return (sum_ij - expected) / (max_index - expected);
}

std::vector<std::size_t> kprototypes(const Dataset& complete, std::size_t k, std::uint64_t seed,
                                     std::optional<double> gamma_opt) {
    if (!complete.complete()) throw DataError("kprototypes: dataset must be complete");
    const std::size_t n = complete.n, d = complete.d();
    if (k < 2 || k > n)
        throw DataError("kprototypes: k out of range [2, " + std::to_string(n) + "]");

    NormalizedDataset norm = normalize_numeric(complete);
    const Dataset& work = norm.dataset;

    std::vector<std::size_t> numeric_cols, cat_cols;
    for (std::size_t j = 0; j < d; ++j)
        (work.schema.columns[j].kind.kind == Kind::Numerical ? numeric_cols : cat_cols)
            .push_back(j);

    double gamma;
    if (gamma_opt) {
        gamma = *gamma_opt;
    } else if (!numeric_cols.empty()) {
        double acc = 0.0;
        for (std::size_t j : numeric_cols) {
            double mean = 0.0, var = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += work.cell(i, j).num;
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                double diff = work.cell(i, j).num - mean;
                var += diff * diff;
            }
            acc += std::sqrt(var / static_cast<double>(n));
        }
        gamma = acc / static_cast<double>(numeric_cols.size()) / 2.0;
    } else {
        gamma = 1.0;
    }

    struct Prototype {
        std::vector<double> nums;     // per numeric column
        std::vector<CellValue> cats;  // per categorical column
    };
    auto point_cost = [&](std::size_t i, const Prototype& p) {
        double cost = 0.0;
        for (std::size_t c = 0; c < numeric_cols.size(); ++c) {
            double diff = work.cell(i, numeric_cols[c]).num - p.nums[c];
            cost += diff * diff;
        }
        for (std::size_t c = 0; c < cat_cols.size(); ++c)
            if (!(work.cell(i, cat_cols[c]) == p.cats[c])) cost += gamma;
        return cost;
    };
    auto from_row = [&](std::size_t i) {
        Prototype p;
        for (std::size_t j : numeric_cols) p.nums.push_back(work.cell(i, j).num);
        for (std::size_t j : cat_cols) p.cats.push_back(work.cell(i, j));
        return p;
    };

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(indices[i], indices[pick(rng)]);
    }
    std::vector<Prototype> protos;
    for (std::size_t c = 0; c < k; ++c) protos.push_back(from_row(indices[c]));

    std::vector<std::size_t> labels(n, 0);
    for (std::size_t iter = 0; iter < 100; ++iter) {
        bool changed = iter == 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_cost = point_cost(i, protos[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double cost = point_cost(i, protos[c]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        // Empty clusters steal the point farthest from its own prototype.
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t l : labels) sizes[l]++;
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t worst = n;
            double worst_cost = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[labels[i]] <= 1) continue;
                double cost = point_cost(i, protos[labels[i]]);
                if (cost > worst_cost) {
                    worst_cost = cost;
                    worst = i;
                }
            }
            if (worst == n) throw InternalError("kprototypes: cannot repair empty cluster");
            sizes[labels[worst]]--;
            labels[worst] = c;
            sizes[c] = 1;
            changed = true;
        }
        if (!changed) break;

        for (std::size_t c = 0; c < k; ++c) {
            Prototype& p = protos[c];
            for (std::size_t cc = 0; cc < numeric_cols.size(); ++cc) {
                double mean = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (labels[i] == c) mean += work.cell(i, numeric_cols[cc]).num;
                p.nums[cc] = mean / static_cast<double>(sizes[c]);
            }
            for (std::size_t cc = 0; cc < cat_cols.size(); ++cc) {
                std::map<std::pair<int, int>, std::size_t> counts;  // (tag, id) -> count
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] != c) continue;
                    const CellValue& v = work.cell(i, cat_cols[cc]);
                    counts[{static_cast<int>(v.tag), v.id}]++;
                }
                std::pair<int, int> best_key{0, 0};
                std::size_t best_count = 0;
                for (const auto& [key, count] : counts)
                    if (count > best_count) {
                        best_count = count;
                        best_key = key;
                    }
                p.cats[cc] = CellValue{static_cast<CellValue::Tag>(best_key.first),
                                       best_key.second, 0.0};
            }
        }
    }
    return labels;
}

MethodSpec MethodSpec::parse(const std::string& token) {
    if (token == "hmvi") return {"hmvi", Ablation::Full};
    if (token == "hmvi-0" || token == "hmvi0") return {"hmvi-0", Ablation::NoNaturalNeighbors};
    if (token == "hmvi-1" || token == "hmvi1") return {"hmvi-1", Ablation::NoPreclustering};
    if (token == "mms") return {"mms", Ablation::Full};
    if (token == "knnmi") return {"knnmi", Ablation::Full};
    throw DataError("unknown method '" + token +
                    "'; valid methods: hmvi, hmvi-0, hmvi-1, mms, knnmi");
}

namespace {

// Silhouette of labels over the unified metric fitted on the (complete)
// dataset being scored.
double unified_cvi(const Dataset& complete, const std::vector<std::size_t>& labels) {
    NormalizedDataset norm = normalize_numeric(complete);
    ValueCatalog catalog = catalog_values(norm.dataset);
    DissimilarityModel model = DissimilarityModel::fit(norm.dataset, catalog, norm.ranges);
    return silhouette(distance_matrix(norm.dataset, model), labels);
}

std::vector<int> to_int_labels(const std::vector<std::size_t>& labels) {
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = static_cast<int>(labels[i]);
    return out;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& complete, const std::vector<int>& true_labels,
                                const ExperimentConfig& config) {
    if (true_labels.size() != complete.n)
        throw DataError("run_experiment: label count does not match dataset");
    if (!complete.complete()) throw DataError("run_experiment: dataset must be complete");

    ExperimentReport report;
    report.base_seed = config.base_seed;

    for (double rate : config.rates) {
        for (std::size_t rep = 0; rep < config.repeats; ++rep) {
            std::uint64_t cell_seed = derive_seed(config.base_seed, rate, rep);

            // ORI baseline: cluster the uncorrupted data with the same seed.
            {
                GridCell cell{"ori", rate, rep, cell_seed, std::nullopt, 0, 0, 0, false, ""};
                auto t0 = std::chrono::steady_clock::now();
                try {
                    auto labels = kprototypes(complete, config.k, cell_seed);
                    cell.ari = ari(true_labels, to_int_labels(labels));
                    cell.cvi = unified_cvi(complete, labels);
                } catch (const Error& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
                cell.wall_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
                report.grid.push_back(std::move(cell));
            }

            Dataset corrupted;
            MissingMask mask;
            bool injected = true;
            try {
                std::tie(corrupted, mask) = inject_missing(complete, rate, cell_seed);
            } catch (const Error& e) {
                injected = false;
                for (const auto& method : config.methods)
                    report.grid.push_back(
                        {method.name, rate, rep, cell_seed, std::nullopt, 0, 0, 0, true, e.what()});
            }
            if (!injected) continue;

            for (const auto& method : config.methods) {
                GridCell cell{method.name, rate, rep, cell_seed, std::nullopt, 0, 0, 0, false, ""};
                auto t0 = std::chrono::steady_clock::now();
                try {
                    Dataset imputed;
                    if (method.name == "mms") {
                        imputed = mms_impute(corrupted);
                    } else if (method.name == "knnmi") {
                        imputed = knnmi_impute(corrupted, config.hmvi.knn_k);
                    } else {
                        HmviConfig hc = config.hmvi;
                        hc.k = config.k;
                        hc.seed = cell_seed;
                        hc.ablation = method.ablation;
                        imputed = hmvi_impute(corrupted, hc).dataset;
                    }
                    cell.mrmse = mrmse(complete, imputed, mask);
                    auto labels = kprototypes(imputed, config.k, cell_seed);
                    cell.ari = ari(true_labels, to_int_labels(labels));
                    cell.cvi = unified_cvi(imputed, labels);
                } catch (const Error& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
                cell.wall_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
                report.grid.push_back(std::move(cell));
            }
        }
    }

    // Per (method, rate) means over successful cells.
    std::map<std::pair<std::string, double>, AggregateRow> agg;
    for (const auto& cell : report.grid) {
        if (cell.failed) continue;
        AggregateRow& row = agg[{cell.method, cell.rate}];
        row.method = cell.method;
        row.rate = cell.rate;
        row.mean_mrmse += cell.mrmse.value_or(0.0);
        row.mean_ari += cell.ari;
        row.mean_cvi += cell.cvi;
        row.cells++;
    }
    for (auto& [key, row] : agg) {
        if (row.cells == 0) continue;
        row.mean_mrmse /= static_cast<double>(row.cells);
        row.mean_ari /= static_cast<double>(row.cells);
        row.mean_cvi /= static_cast<double>(row.cells);
        report.means.push_back(row);
    }
    return report;
}

std::string grid_csv(const ExperimentReport& report) {
    // wall_ms stays out of the file so reruns reproduce it byte-for-byte.
    std::string out = "method,rate,repeat,seed,mrmse,ari,cvi,status,error\n";
    for (const auto& c : report.grid) {
        out += c.method + "," + format_numeric(c.rate, 6) + "," + std::to_string(c.repeat) + "," +
               std::to_string(c.seed) + ",";
        out += c.mrmse ? format_numeric(*c.mrmse, 6) : std::string();
        out += "," + format_numeric(c.ari, 6) + "," + format_numeric(c.cvi, 6) + ",";
        out += c.failed ? "failed" : "ok";
        out += ",";
        std::string err = c.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out += err + "\n";
    }
    return out;
}

std::string means_csv(const ExperimentReport& report) {
    std::string out = "method,rate,mean_mrmse,mean_ari,mean_cvi,cells\n";
    for (const auto& r : report.means)
        out += r.method + "," + format_numeric(r.rate, 6) + "," +
               format_numeric(r.mean_mrmse, 6) + "," + format_numeric(r.mean_ari, 6) + "," +
               format_numeric(r.mean_cvi, 6) + "," + std::to_string(r.cells) + "\n";
    return out;
}

}  // namespace hmvi
