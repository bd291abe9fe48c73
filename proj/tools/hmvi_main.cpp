#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hmvi/clustering.hpp"
#include "hmvi/data_model.hpp"
#include "hmvi/errors.hpp"
#include "hmvi/evaluation.hpp"
#include "hmvi/imputer.hpp"
#include "hmvi/metric.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hmvi::DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hmvi::DataError("cannot write file: " + path.string());
    out << content;
}

struct CommonOpts {
    std::string input;
    std::string schema;
    std::string missing_token = "?";
    bool header = false;
    std::string output;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "input CSV file")->required();
        cmd->add_option("--schema", schema, "schema file")->required();
        cmd->add_option("--missing-token", missing_token, "token marking missing cells");
        cmd->add_flag("--header", header, "skip the first CSV line");
        cmd->add_option("--output", output, "output directory")->required();
    }

    hmvi::Dataset load() const {
        hmvi::Schema s = hmvi::parse_schema(read_file(schema));
        return hmvi::load_dataset(read_file(input), s, missing_token, header);
    }
};

std::uint64_t materialize_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    std::cerr << "seed not supplied; materialized seed=" << s << "\n";
    return s;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const std::vector<std::string>& args) {
    json m;
    m["subcommand"] = subcommand;
    m["args"] = args;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

void append_common(std::vector<std::string>& args, const CommonOpts& c) {
    args.insert(args.end(), {"--input", c.input, "--schema", c.schema, "--missing-token",
                             c.missing_token, "--output", c.output});
    if (c.header) args.push_back("--header");
}

void dump_model(const fs::path& dir, const hmvi::Dataset& ds) {
    hmvi::NormalizedDataset norm = hmvi::normalize_numeric(ds);
    hmvi::ValueCatalog catalog = hmvi::catalog_values(norm.dataset);
    hmvi::DissimilarityModel model =
        hmvi::DissimilarityModel::fit(norm.dataset, catalog, norm.ranges);

    std::string w = "attribute";
    for (const auto& col : ds.schema.columns) w += "," + col.name;
    w += "\n";
    for (std::size_t r = 0; r < ds.d(); ++r) {
        w += ds.schema.columns[r].name;
        for (std::size_t s = 0; s < ds.d(); ++s)
            w += "," + hmvi::format_numeric(model.weights.w[r][s], 6);
        w += "\n";
    }
    write_file(dir / "weights.csv", w);

    for (std::size_t r = 0; r < ds.d(); ++r) {
        if (model.pair_tables[r].empty()) continue;
        std::size_t k = catalog.attrs[r].size();
        std::string t;
        for (std::size_t q = 0; q < k; ++q) {
            for (std::size_t h = 0; h < k; ++h) {
                if (h) t += ",";
                t += hmvi::format_numeric(model.pair_value(r, q, h), 6);
            }
            t += "\n";
        }
        write_file(dir / ("pair_table_" + ds.schema.columns[r].name + ".csv"), t);
    }
}

std::string report_text(const hmvi::HmviResult& result, std::uint64_t seed,
                        const std::string& method) {
    std::string out;
    out += "method: " + method + "\n";
    out += "seed: " + std::to_string(seed) + "\n";
    out += "targets imputed: " + std::to_string(result.report.iterations) + "\n";
    out += "cells imputed: " + std::to_string(result.report.log.size()) + "\n";
    out += "medoids:";
    for (std::size_t m : result.clusters.medoids) out += " " + std::to_string(m);
    out += "\n";
    for (const auto& w : result.report.warnings) out += "warning: " + w + "\n";
    for (const auto& e : result.report.log) {
        out += "fill row=" + std::to_string(e.row) + " col=" + std::to_string(e.col) +
               " donors=" + std::to_string(e.donor_count) + " cluster=";
        out += e.cluster == hmvi::ImputedCell::kNoCluster ? "-" : std::to_string(e.cluster);
        out += "\n";
    }
    return out;
}

int cmd_impute(const CommonOpts& common, const std::string& method, std::size_t k,
               std::uint64_t seed, std::size_t max_iter, const std::string& refresh,
               const std::string& ablation, std::size_t knn_k, const std::string& dump_dir) {
    hmvi::Dataset ds = common.load();
    fs::path dir(common.output);

    std::vector<std::string> args = {"--method", method, "--k", std::to_string(k),
                                     "--seed", std::to_string(seed),
                                     "--max-iter", std::to_string(max_iter),
                                     "--refresh", refresh, "--ablation", ablation,
                                     "--knn-k", std::to_string(knn_k)};
    append_common(args, common);
    write_manifest(dir, "impute", args);

    if (!dump_dir.empty()) dump_model(dump_dir, ds);

    if (method == "mms") {
        write_file(dir / "complete.csv",
                   hmvi::serialize_dataset(hmvi::mms_impute(ds), common.missing_token, 6));
        return 0;
    }
    if (method == "knnmi") {
        std::vector<std::string> warnings;
        hmvi::Dataset out = hmvi::knnmi_impute(ds, knn_k, &warnings);
        write_file(dir / "complete.csv", hmvi::serialize_dataset(out, common.missing_token, 6));
        std::string rep = "method: knnmi\nseed: " + std::to_string(seed) + "\n";
        for (const auto& w : warnings) rep += "warning: " + w + "\n";
        write_file(dir / "report.txt", rep);
        return 0;
    }

    hmvi::MethodSpec spec = hmvi::MethodSpec::parse(method);
    hmvi::HmviConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.max_iter = max_iter;
    cfg.knn_k = knn_k;
    cfg.refresh =
        refresh == "incremental" ? hmvi::RefreshPolicy::Incremental : hmvi::RefreshPolicy::Full;
    cfg.ablation = spec.ablation;
    if (ablation == "no_natural_neighbors") cfg.ablation = hmvi::Ablation::NoNaturalNeighbors;
    if (ablation == "no_preclustering") cfg.ablation = hmvi::Ablation::NoPreclustering;

    hmvi::HmviResult result = hmvi::hmvi_impute(ds, cfg);
    write_file(dir / "complete.csv",
               hmvi::serialize_dataset(result.dataset, common.missing_token, 6));
    std::string clusters = "row,cluster\n";
    for (std::size_t i = 0; i < result.clusters.assignment.size(); ++i)
        clusters += std::to_string(i) + "," + std::to_string(result.clusters.assignment[i]) + "\n";
    write_file(dir / "clusters.csv", clusters);
    write_file(dir / "report.txt", report_text(result, seed, method));
    return 0;
}

int cmd_inject(const CommonOpts& common, double rate, std::uint64_t seed) {
    hmvi::Dataset ds = common.load();
    fs::path dir(common.output);
    std::vector<std::string> args = {"--rate", hmvi::format_numeric(rate, 17), "--seed",
                                     std::to_string(seed)};
    append_common(args, common);
    write_manifest(dir, "inject", args);

    auto [corrupted, mask] = hmvi::inject_missing(ds, rate, seed);
    write_file(dir / "corrupted.csv",
               hmvi::serialize_dataset(corrupted, common.missing_token, 17));
    std::string m = "row,column\n";
    for (auto [i, j] : mask.cells) m += std::to_string(i) + "," + std::to_string(j) + "\n";
    write_file(dir / "mask.csv", m);
    return 0;
}

int cmd_evaluate(const CommonOpts& common, const std::string& labels_col,
                 const std::string& methods_csv, const std::string& rates_csv,
                 std::size_t repeats, std::size_t k, std::uint64_t seed,
                 const std::string& ablation, std::size_t knn_k, const std::string& refresh) {
    hmvi::Dataset full = common.load();
    int lc = full.schema.find(labels_col);
    if (lc < 0) throw hmvi::DataError("labels column '" + labels_col + "' not in schema");

    std::vector<int> labels;
    for (std::size_t i = 0; i < full.n; ++i) {
        const hmvi::CellValue& c = full.cell(i, static_cast<std::size_t>(lc));
        if (c.is_missing()) throw hmvi::DataError("labels column has missing cells");
        labels.push_back(c.tag == hmvi::CellValue::Tag::Numeric
                             ? static_cast<int>(std::llround(c.num))
                             : c.id);
    }

    // Labels are scoring-only; drop the column from the feature table.
    hmvi::Dataset features;
    features.n = full.n;
    for (std::size_t j = 0; j < full.d(); ++j) {
        if (j == static_cast<std::size_t>(lc)) continue;
        features.schema.columns.push_back(full.schema.columns[j]);
        features.nominal_labels.push_back(full.nominal_labels[j]);
    }
    for (std::size_t i = 0; i < full.n; ++i)
        for (std::size_t j = 0; j < full.d(); ++j)
            if (j != static_cast<std::size_t>(lc)) features.cells.push_back(full.cell(i, j));

    hmvi::ExperimentConfig cfg;
    cfg.base_seed = seed;
    cfg.repeats = repeats;
    cfg.k = k;
    cfg.hmvi.knn_k = knn_k;
    cfg.hmvi.max_iter = 100;
    cfg.hmvi.refresh =
        refresh == "incremental" ? hmvi::RefreshPolicy::Incremental : hmvi::RefreshPolicy::Full;

    cfg.rates.clear();
    std::stringstream rs(rates_csv);
    std::string tok;
    while (std::getline(rs, tok, ',')) cfg.rates.push_back(std::stod(tok));

    std::stringstream ms(methods_csv);
    while (std::getline(ms, tok, ',')) {
        hmvi::MethodSpec spec = hmvi::MethodSpec::parse(tok);
        if (spec.name == "hmvi" && ablation == "no_natural_neighbors")
            spec = {"hmvi-0", hmvi::Ablation::NoNaturalNeighbors};
        if (spec.name == "hmvi" && ablation == "no_preclustering")
            spec = {"hmvi-1", hmvi::Ablation::NoPreclustering};
        cfg.methods.push_back(spec);
    }

    fs::path dir(common.output);
    std::vector<std::string> args = {"--labels", labels_col, "--methods", methods_csv,
                                     "--rates", rates_csv, "--repeats", std::to_string(repeats),
                                     "--k", std::to_string(k), "--seed", std::to_string(seed),
                                     "--ablation", ablation, "--knn-k", std::to_string(knn_k),
                                     "--refresh", refresh};
    append_common(args, common);
    write_manifest(dir, "evaluate", args);

    hmvi::ExperimentReport report = hmvi::run_experiment(features, labels, cfg);
    write_file(dir / "grid.csv", hmvi::grid_csv(report));
    write_file(dir / "means.csv", hmvi::means_csv(report));
    for (const auto& cell : report.grid)
        if (cell.failed)
            std::cerr << "cell failed: " << cell.method << " rate=" << cell.rate
                      << " repeat=" << cell.repeat << ": " << cell.error << "\n";
    return 0;
}

int cmd_inspect(const CommonOpts& common) {
    hmvi::Dataset ds = common.load();
    fs::path dir(common.output);
    std::vector<std::string> args;
    append_common(args, common);
    write_manifest(dir, "inspect", args);
    dump_model(dir, ds);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HMVI: clustering-coupled missing-value imputation for mixed-type tables"};
    app.require_subcommand(1);

    CommonOpts imp_common, inj_common, eval_common, ins_common;

    auto* imp = app.add_subcommand("impute", "fill missing cells and write a complete CSV");
    imp_common.attach(imp);
    std::string imp_method = "hmvi";
    std::size_t imp_k = 2, imp_max_iter = 100, imp_knn_k = 5;
    std::optional<std::uint64_t> imp_seed;
    std::string imp_refresh = "full", imp_ablation = "full", imp_dump;
    imp->add_option("--method", imp_method, "hmvi | hmvi-0 | hmvi-1 | mms | knnmi");
    imp->add_option("--k", imp_k, "cluster count");
    imp->add_option("--seed", imp_seed, "random seed (materialized if omitted)");
    imp->add_option("--max-iter", imp_max_iter, "clustering swap iterations");
    imp->add_option("--refresh", imp_refresh, "full | incremental")
        ->check(CLI::IsMember({"full", "incremental"}));
    imp->add_option("--ablation", imp_ablation, "full | no_natural_neighbors | no_preclustering")
        ->check(CLI::IsMember({"full", "no_natural_neighbors", "no_preclustering"}));
    imp->add_option("--knn-k", imp_knn_k, "neighbor count for the knnmi baseline");
    imp->add_option("--dump-model", imp_dump, "also dump weights and pair tables here");

    auto* inj = app.add_subcommand("inject", "remove cells at random and write the mask");
    inj_common.attach(inj);
    double inj_rate = 0.1;
    std::optional<std::uint64_t> inj_seed;
    inj->add_option("--rate", inj_rate, "fraction of cells to remove, in (0,1)")->required();
    inj->add_option("--seed", inj_seed, "random seed (materialized if omitted)");

    auto* eval = app.add_subcommand("evaluate", "run the full injection/imputation grid");
    eval_common.attach(eval);
    std::string eval_labels, eval_methods = "hmvi,mms,knnmi", eval_rates = "0.1,0.2,0.3,0.4,0.5";
    std::string eval_ablation = "full", eval_refresh = "full";
    std::size_t eval_repeats = 10, eval_k = 2, eval_knn_k = 5;
    std::optional<std::uint64_t> eval_seed;
    eval->add_option("--labels", eval_labels, "class label column (scoring only)")->required();
    eval->add_option("--methods", eval_methods, "comma-separated method list");
    eval->add_option("--rates", eval_rates, "comma-separated missing rates");
    eval->add_option("--repeats", eval_repeats, "repeats per rate");
    eval->add_option("--k", eval_k, "cluster count");
    eval->add_option("--seed", eval_seed, "base seed (materialized if omitted)");
    eval->add_option("--ablation", eval_ablation, "ablation applied to hmvi runs")
        ->check(CLI::IsMember({"full", "no_natural_neighbors", "no_preclustering"}));
    eval->add_option("--knn-k", eval_knn_k, "neighbor count for the knnmi baseline");
    eval->add_option("--refresh", eval_refresh, "full | incremental")
        ->check(CLI::IsMember({"full", "incremental"}));

    auto* ins = app.add_subcommand("inspect", "dump interdependence weights and pair tables");
    ins_common.attach(ins);

    CLI11_PARSE(app, argc, argv);

    try {
        if (imp->parsed())
            return cmd_impute(imp_common, imp_method, imp_k, materialize_seed(imp_seed),
                              imp_max_iter, imp_refresh, imp_ablation, imp_knn_k, imp_dump);
        if (inj->parsed()) return cmd_inject(inj_common, inj_rate, materialize_seed(inj_seed));
        if (eval->parsed())
            return cmd_evaluate(eval_common, eval_labels, eval_methods, eval_rates, eval_repeats,
                                eval_k, materialize_seed(eval_seed), eval_ablation, eval_knn_k,
                                eval_refresh);
        if (ins->parsed()) return cmd_inspect(ins_common);
    } catch (const hmvi::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const hmvi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
