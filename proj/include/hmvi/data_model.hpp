#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hmvi {

enum class Kind { Nominal, Ordinal, Numerical };

struct AttributeKind {
    Kind kind = Kind::Nominal;
    // Ordinal only: distinct level labels in schema-declared order.
    std::vector<std::string> levels;
};

struct Column {
    std::string name;
    AttributeKind kind;
};

struct Schema {
    std::vector<Column> columns;

    std::size_t d() const { return columns.size(); }
    // Index of the named column, or -1.
    int find(const std::string& name) const;
};

struct CellValue {
    enum class Tag : std::uint8_t { Missing, Nominal, Ordinal, Numeric };

    Tag tag = Tag::Missing;
    int id = 0;        // nominal category id, or ordinal rank
    double num = 0.0;  // numeric value

    static CellValue missing() { return {}; }
    static CellValue nominal(int category) { return {Tag::Nominal, category, 0.0}; }
    static CellValue ordinal(int rank) { return {Tag::Ordinal, rank, 0.0}; }
    static CellValue numeric(double v) { return {Tag::Numeric, 0, v}; }

    bool is_missing() const { return tag == Tag::Missing; }
    bool operator==(const CellValue&) const = default;
};

// Column-typed table with an explicit missing marker. Immutable by
// convention after construction; pipeline steps build new values.
struct Dataset {
    Schema schema;
    std::size_t n = 0;
    std::vector<CellValue> cells;  // row-major, n * d
    // Per column, category id -> label, in first-appearance order.
    // Empty vectors for non-nominal columns.
    std::vector<std::vector<std::string>> nominal_labels;

    std::size_t d() const { return schema.d(); }
    CellValue& cell(std::size_t row, std::size_t col) { return cells[row * d() + col]; }
    const CellValue& cell(std::size_t row, std::size_t col) const { return cells[row * d() + col]; }
    std::vector<CellValue> row(std::size_t i) const;

    std::size_t missing_in_row(std::size_t i) const;
    // Indices of rows with at least one missing cell (the set T).
    std::vector<std::size_t> incomplete_rows() const;
    bool complete() const;
};

struct NumericRange {
    double min = 0.0;
    double max = 0.0;
};

struct AttributeCatalog {
    // Categorical columns: distinct observed ids/ranks, nominal in
    // first-appearance (id) order, ordinal in ascending rank order.
    std::vector<int> cat_values;
    // Numerical columns: equal-frequency bins. edges holds the B-1
    // interior cut points, means the per-bin representative values.
    std::vector<double> bin_edges;
    std::vector<double> bin_means;
    double min = 0.0;
    double max = 0.0;
    std::size_t distinct = 0;

    std::size_t size() const;  // K^r
};

struct ValueCatalog {
    std::vector<AttributeCatalog> attrs;

    // Catalog position of a cell's value (numeric cells map to their
    // bin); -1 for missing.
    int index_of(const Schema& schema, std::size_t attr, const CellValue& v) const;
    // Catalog entry at position idx as a representative CellValue
    // (numeric -> bin mean).
    CellValue value_at(const Schema& schema, std::size_t attr, std::size_t idx) const;
};

Schema parse_schema(const std::string& text);

Dataset load_dataset(const std::string& csv, const Schema& schema,
                     const std::string& missing_token = "?", bool skip_header = false);

// numeric_precision: significant digits for numeric cells (17 round-trips
// doubles exactly; the CLI uses 6).
std::string serialize_dataset(const Dataset& ds, const std::string& missing_token = "?",
                              int numeric_precision = 17);

ValueCatalog catalog_values(const Dataset& ds);

struct NormalizedDataset {
    Dataset dataset;
    // Per column; engaged for numerical columns only.
    std::vector<std::optional<NumericRange>> ranges;
};

// Maps every numeric cell to (x-min)/(max-min); constant columns to 0.
NormalizedDataset normalize_numeric(const Dataset& ds);

double denormalize(double v, const NumericRange& range);

std::string format_numeric(double v, int precision);

}  // namespace hmvi
