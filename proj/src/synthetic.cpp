#include "hmvi/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hmvi {

namespace {

Schema mixed_schema() {
    Schema schema;
    auto nominal = [](const std::string& name) {
        return Column{name, AttributeKind{Kind::Nominal, {}}};
    };
    auto ordinal = [](const std::string& name, std::vector<std::string> levels) {
        return Column{name, AttributeKind{Kind::Ordinal, std::move(levels)}};
    };
    auto numerical = [](const std::string& name) {
        return Column{name, AttributeKind{Kind::Numerical, {}}};
    };
    schema.columns = {
        nominal("color"),
        nominal("shape"),
        nominal("texture"),
        ordinal("grade", {"low", "mid", "high", "top"}),
        ordinal("dose", {"none", "half", "full"}),
        numerical("width"),
        numerical("height"),
        numerical("mass"),
    };
    return schema;
}

}  // namespace

LabeledDataset make_mixed_fixture(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.06);

    LabeledDataset out;
    out.dataset.schema = mixed_schema();
    out.dataset.n = n;
    out.dataset.nominal_labels.resize(8);
    out.dataset.nominal_labels[0] = {"red", "green", "blue", "black"};
    out.dataset.nominal_labels[1] = {"round", "square", "star", "cross"};
    out.dataset.nominal_labels[2] = {"rough", "smooth", "ridged"};

    auto bucket = [](double u, int buckets) {
        int b = static_cast<int>(u * buckets);
        return std::clamp(b, 0, buckets - 1);
    };

    for (std::size_t i = 0; i < n; ++i) {
        int cls = i < n / 2 ? 0 : 1;
        double u = unif(rng);  // latent within-class position

        // Class-dominant nominal; 10% label noise.
        int color = unif(rng) < 0.9 ? (cls == 0 ? 0 : 2) : (cls == 0 ? 1 : 3);
        // Locality-sensitive nominal: latent bucket shifted by class.
        int shape = unif(rng) < 0.85 ? (bucket(u, 2) + 2 * cls) : bucket(unif(rng), 4);
        // Locality-sensitive nominal shared across classes.
        int texture = unif(rng) < 0.85 ? bucket(u, 3) : bucket(unif(rng), 3);
        // Ordinal following class and latent position.
        int grade = bucket(std::clamp(0.5 * cls + 0.5 * u + noise(rng) * 0.5, 0.0, 0.999), 4);
        int dose = bucket(std::clamp(u + noise(rng), 0.0, 0.999), 3);
        double width = 2.0 * cls + 1.0 * u + noise(rng);
        double height = -1.5 * cls + 0.8 * u + noise(rng);
        double mass = 1.0 * cls + 1.2 * (1.0 - u) + noise(rng);

        out.dataset.cells.push_back(CellValue::nominal(color));
        out.dataset.cells.push_back(CellValue::nominal(shape));
        out.dataset.cells.push_back(CellValue::nominal(texture));
        out.dataset.cells.push_back(CellValue::ordinal(grade));
        out.dataset.cells.push_back(CellValue::ordinal(dose));
        out.dataset.cells.push_back(CellValue::numeric(width));
        out.dataset.cells.push_back(CellValue::numeric(height));
        out.dataset.cells.push_back(CellValue::numeric(mass));
        out.labels.push_back(cls);
    }
    return out;
}

Dataset make_two_blob_fixture() {
    Dataset ds;
    ds.schema.columns = {Column{"x", AttributeKind{Kind::Numerical, {}}}};
    ds.nominal_labels.resize(1);
    ds.n = 10;
    for (double v : {0.0, 1.0, 2.0, 3.0, 4.0, 100.0, 101.0, 102.0, 103.0, 104.0})
        ds.cells.push_back(CellValue::numeric(v));
    return ds;
}

}  // namespace hmvi
