#include "hmvi/imputer.hpp"

#include <algorithm>
#include <string>

#include "hmvi/errors.hpp"
#include "hmvi/neighbors.hpp"

namespace hmvi {

namespace {

std::vector<std::size_t> sorted_targets(const Dataset& ds) {
    std::vector<std::size_t> targets = ds.incomplete_rows();
    std::stable_sort(targets.begin(), targets.end(), [&](std::size_t a, std::size_t b) {
        return ds.missing_in_row(a) < ds.missing_in_row(b);
    });
    return targets;
}

std::vector<std::size_t> cluster_members(const ClusterModel& cm, std::size_t cluster) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < cm.assignment.size(); ++i)
        if (cm.assignment[i] == cluster) members.push_back(i);
    return members;
}

std::vector<std::size_t> without(const std::vector<std::size_t>& set, std::size_t x) {
    std::vector<std::size_t> out;
    out.reserve(set.size());
    for (std::size_t v : set)
        if (v != x) out.push_back(v);
    return out;
}

CellValue to_original_scale(const CellValue& v, std::size_t attr,
                            const std::vector<std::optional<NumericRange>>& ranges) {
    if (v.tag == CellValue::Tag::Numeric && ranges[attr])
        return CellValue::numeric(denormalize(v.num, *ranges[attr]));
    return v;
}

}  // namespace

std::vector<std::size_t> order_missing_attributes(const std::vector<CellValue>& row,
                                                  const WeightMatrix& weights,
                                                  bool* degenerate) {
    if (degenerate) *degenerate = false;
    std::vector<std::size_t> missing, observed;
    for (std::size_t j = 0; j < row.size(); ++j)
        (row[j].is_missing() ? missing : observed).push_back(j);
    if (observed.empty()) {
        if (degenerate) *degenerate = true;
        return missing;  // already ascending by index
    }
    std::vector<double> score(row.size(), 0.0);
    for (std::size_t r : missing) {
        double best = 0.0;
        for (std::size_t s : observed)
            best = std::max(best, (weights.w[r][s] + weights.w[s][r]) / 2.0);
        score[r] = best;
    }
    std::stable_sort(missing.begin(), missing.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    return missing;
}

CellValue impute_cell(const Dataset& ds, const ValueCatalog& catalog, std::size_t attr,
                      const std::vector<std::size_t>& donors) {
    const Kind kind = ds.schema.columns[attr].kind.kind;
    if (kind == Kind::Numerical) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i : donors) {
            const CellValue& c = ds.cell(i, attr);
            if (c.is_missing()) continue;
            sum += c.num;
            ++count;
        }
        if (count == 0) throw InternalError("impute_cell: no donor observes the attribute");
        return CellValue::numeric(sum / static_cast<double>(count));
    }
    std::vector<std::size_t> counts(catalog.attrs[attr].size(), 0);
    std::size_t total = 0;
    for (std::size_t i : donors) {
        const CellValue& c = ds.cell(i, attr);
        if (c.is_missing()) continue;
        counts[static_cast<std::size_t>(catalog.index_of(ds.schema, attr, c))]++;
        ++total;
    }
    if (total == 0) throw InternalError("impute_cell: no donor observes the attribute");
    std::size_t best = 0;
    for (std::size_t t = 1; t < counts.size(); ++t)
        if (counts[t] > counts[best]) best = t;  // tie keeps the lower catalog index
    return catalog.value_at(ds.schema, attr, best);
}

HmviResult hmvi_impute(const Dataset& dataset, const HmviConfig& config) {
    if (config.k < 2) throw DataError("hmvi: k must be at least 2");
    if (dataset.n < config.k) throw DataError("hmvi: fewer objects than clusters");

    NormalizedDataset norm = normalize_numeric(dataset);
    Dataset work = norm.dataset;
    ValueCatalog catalog = catalog_values(work);  // rejects fully-missing columns
    DissimilarityModel model = DissimilarityModel::fit(work, catalog, norm.ranges);

    HmviResult result;
    result.dataset = dataset;
    ImputationReport& report = result.report;
    if (model.zero_support_fallbacks > 0)
        report.warnings.push_back("zero-support conditionals fell back to psi=1 (" +
                                  std::to_string(model.zero_support_fallbacks) + " times)");

    const bool use_clusters = config.ablation != Ablation::NoPreclustering;
    std::vector<std::size_t> all_rows(work.n);
    for (std::size_t i = 0; i < work.n; ++i) all_rows[i] = i;

    DistanceMatrix dist = distance_matrix(work, model);
    ClusterModel cm;
    if (use_clusters) cm = cluster(dist, config.k, config.seed, config.max_iter);

    auto pick_donors = [&](const std::vector<std::size_t>& members, std::size_t target) {
        if (config.ablation == Ablation::NoNaturalNeighbors) return without(members, target);
        bool degenerate = false;
        auto donors = natural_neighbors_within(dist, members, target, &degenerate);
        if (degenerate)
            report.warnings.push_back("row " + std::to_string(target) +
                                      ": degenerate member set, widened donor pool");
        return donors;
    };

    for (std::size_t target : sorted_targets(work)) {
        if (use_clusters && config.refresh == RefreshPolicy::Full)
            cm = cluster(dist, config.k, config.seed, config.max_iter);

        std::size_t current = use_clusters ? cm.assignment[target] : ImputedCell::kNoCluster;
        std::vector<std::size_t> members =
            use_clusters ? cluster_members(cm, current) : all_rows;
        std::vector<std::size_t> donors_base = pick_donors(members, target);

        bool no_observed = false;
        auto order = order_missing_attributes(work.row(target), model.weights, &no_observed);
        if (no_observed)
            report.warnings.push_back("row " + std::to_string(target) +
                                      ": no observed attributes, index-order imputation");

        for (std::size_t attr : order) {
            std::vector<std::size_t> donors;
            auto observes = [&](std::size_t i) { return !work.cell(i, attr).is_missing(); };
            for (std::size_t i : donors_base)
                if (observes(i)) donors.push_back(i);
            if (donors.empty()) {
                for (std::size_t i : members)
                    if (i != target && observes(i)) donors.push_back(i);
                if (!donors.empty())
                    report.warnings.push_back("row " + std::to_string(target) + ", column " +
                                              std::to_string(attr) +
                                              ": widened donors to cluster members");
            }
            if (donors.empty()) {
                for (std::size_t i : all_rows)
                    if (i != target && observes(i)) donors.push_back(i);
                report.warnings.push_back("row " + std::to_string(target) + ", column " +
                                          std::to_string(attr) +
                                          ": widened donors to the whole column");
            }
            if (donors.empty())
                throw InternalError("no donor observes column " + std::to_string(attr));

            CellValue filled = impute_cell(work, catalog, attr, donors);
            work.cell(target, attr) = filled;
            CellValue original = to_original_scale(filled, attr, norm.ranges);
            result.dataset.cell(target, attr) = original;
            report.log.push_back({target, attr, original, donors.size(), current});

            update_row(dist, work, model, target);
            if (use_clusters) {
                current = assign_object(dist, cm, target);
                members = cluster_members(cm, current);
            }
            donors_base = pick_donors(members, target);
        }
        ++report.iterations;
    }

    if (!work.complete()) throw InternalError("imputation left missing cells behind");
    result.clusters = cluster(dist, config.k, config.seed, config.max_iter);
    return result;
}

Dataset mms_impute(const Dataset& dataset) {
    ValueCatalog catalog = catalog_values(dataset);  // rejects fully-missing columns
    Dataset out = dataset;
    for (std::size_t j = 0; j < dataset.d(); ++j) {
        std::vector<std::size_t> observed;
        for (std::size_t i = 0; i < dataset.n; ++i)
            if (!dataset.cell(i, j).is_missing()) observed.push_back(i);
        CellValue fill = impute_cell(dataset, catalog, j, observed);
        for (std::size_t i = 0; i < dataset.n; ++i)
            if (out.cell(i, j).is_missing()) out.cell(i, j) = fill;
    }
    return out;
}

Dataset knnmi_impute(const Dataset& dataset, std::size_t knn_k,
                     std::vector<std::string>* warnings) {
    if (knn_k < 1) throw DataError("knnmi: k must be at least 1");
    std::vector<std::size_t> complete;
    for (std::size_t i = 0; i < dataset.n; ++i)
        if (dataset.missing_in_row(i) == 0) complete.push_back(i);
    if (complete.empty()) {
        if (warnings) warnings->push_back("no complete rows; fell back to mean/mode substitution");
        return mms_impute(dataset);
    }

    NormalizedDataset norm = normalize_numeric(dataset);
    const Dataset& work = norm.dataset;
    ValueCatalog catalog = catalog_values(work);
    DissimilarityModel model = DissimilarityModel::fit(work, catalog, norm.ranges);

    Dataset out = dataset;
    std::size_t k = std::min(knn_k, complete.size());
    for (std::size_t i : dataset.incomplete_rows()) {
        std::vector<std::size_t> order = complete;
        std::vector<double> d(dataset.n, 0.0);
        for (std::size_t j : complete) d[j] = object_distance(work, i, j, model);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
        order.resize(k);
        for (std::size_t attr = 0; attr < dataset.d(); ++attr) {
            if (!work.cell(i, attr).is_missing()) continue;
            CellValue filled = impute_cell(work, catalog, attr, order);
            out.cell(i, attr) = to_original_scale(filled, attr, norm.ranges);
        }
    }
    return out;
}

}  // namespace hmvi
