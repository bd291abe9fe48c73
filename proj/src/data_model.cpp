#include "hmvi/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "hmvi/errors.hpp"

namespace hmvi {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// RFC-4180-style field splitting for one logical record. `pos` points at
// the start of the record inside `text` and is advanced past it.
std::vector<std::string> parse_csv_record(const std::string& text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                } else {
                    quoted = false;
                    ++pos;
                }
            } else {
                field += c;
                ++pos;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
            ++pos;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            fields.push_back(field);
            return fields;
        } else {
            field += c;
            ++pos;
        }
    }
    fields.push_back(field);
    return fields;
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + token.size() && token.size() > 0 && std::isfinite(out);
}

}  // namespace

int Schema::find(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<CellValue> Dataset::row(std::size_t i) const {
    return {cells.begin() + static_cast<long>(i * d()),
            cells.begin() + static_cast<long>((i + 1) * d())};
}

std::size_t Dataset::missing_in_row(std::size_t i) const {
    std::size_t count = 0;
    for (std::size_t j = 0; j < d(); ++j)
        if (cell(i, j).is_missing()) ++count;
    return count;
}

std::vector<std::size_t> Dataset::incomplete_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (missing_in_row(i) > 0) out.push_back(i);
    return out;
}

bool Dataset::complete() const { return incomplete_rows().empty(); }

Schema parse_schema(const std::string& text) {
    Schema schema;
    std::unordered_map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto parts = split(s, ':');
        if (parts.size() < 2)
            throw ParseError("schema line " + std::to_string(lineno) + ": expected name:kind");
        std::string name = trim(parts[0]);
        std::string kind = trim(parts[1]);
        if (name.empty())
            throw ParseError("schema line " + std::to_string(lineno) + ": empty column name");
        if (seen.count(name))
            throw ParseError("schema line " + std::to_string(lineno) + ": duplicate column '" +
                             name + "'");
        Column col;
        col.name = name;
        if (kind == "nominal") {
            col.kind.kind = Kind::Nominal;
        } else if (kind == "numerical") {
            col.kind.kind = Kind::Numerical;
        } else if (kind == "ordinal") {
            col.kind.kind = Kind::Ordinal;
            if (parts.size() < 3)
                throw ParseError("schema line " + std::to_string(lineno) +
                                 ": ordinal column needs a level list");
            for (const auto& lvl : split(trim(parts[2]), '<')) {
                std::string level = trim(lvl);
                if (level.empty())
                    throw ParseError("schema line " + std::to_string(lineno) +
                                     ": empty ordinal level");
                if (std::find(col.kind.levels.begin(), col.kind.levels.end(), level) !=
                    col.kind.levels.end())
                    throw ParseError("schema line " + std::to_string(lineno) +
                                     ": duplicate ordinal level '" + level + "'");
                col.kind.levels.push_back(level);
            }
            if (col.kind.levels.empty())
                throw ParseError("schema line " + std::to_string(lineno) + ": empty level list");
        } else {
            throw ParseError("schema line " + std::to_string(lineno) + ": unknown kind '" + kind +
                             "'");
        }
        if (parts.size() > 2 && col.kind.kind != Kind::Ordinal)
            throw ParseError("schema line " + std::to_string(lineno) +
                             ": level list only valid for ordinal columns");
        seen[name] = lineno;
        schema.columns.push_back(std::move(col));
    }
    if (schema.columns.empty()) throw ParseError("schema has no columns");
    return schema;
}

Dataset load_dataset(const std::string& csv, const Schema& schema,
                     const std::string& missing_token, bool skip_header) {
    Dataset ds;
    ds.schema = schema;
    ds.nominal_labels.resize(schema.d());
    std::vector<std::unordered_map<std::string, int>> nominal_ids(schema.d());

    std::size_t pos = 0;
    std::size_t rowno = 0;
    bool first = true;
    while (pos < csv.size()) {
        auto fields = parse_csv_record(csv, pos);
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        ++rowno;
        if (fields.size() != schema.d())
            throw ParseError("row " + std::to_string(rowno) + ": expected " +
                             std::to_string(schema.d()) + " fields, got " +
                             std::to_string(fields.size()));
        for (std::size_t j = 0; j < schema.d(); ++j) {
            std::string token = trim(fields[j]);
            if (token.empty() || token == missing_token) {
                ds.cells.push_back(CellValue::missing());
                continue;
            }
            const Column& col = schema.columns[j];
            switch (col.kind.kind) {
                case Kind::Numerical: {
                    double v;
                    if (!parse_double(token, v))
                        throw ParseError("row " + std::to_string(rowno) + ", column '" + col.name +
                                         "': numeric parse failure for '" + token + "'");
                    ds.cells.push_back(CellValue::numeric(v));
                    break;
                }
                case Kind::Ordinal: {
                    auto it = std::find(col.kind.levels.begin(), col.kind.levels.end(), token);
                    if (it == col.kind.levels.end())
                        throw ParseError("row " + std::to_string(rowno) + ", column '" + col.name +
                                         "': ordinal label '" + token + "' not in level list");
                    ds.cells.push_back(
                        CellValue::ordinal(static_cast<int>(it - col.kind.levels.begin())));
                    break;
                }
                case Kind::Nominal: {
                    auto [it, inserted] = nominal_ids[j].try_emplace(
                        token, static_cast<int>(ds.nominal_labels[j].size()));
                    if (inserted) ds.nominal_labels[j].push_back(token);
                    ds.cells.push_back(CellValue::nominal(it->second));
                    break;
                }
            }
        }
    }
    ds.n = rowno;
    if (ds.n == 0) throw ParseError("dataset has no rows");
    return ds;
}

std::string format_numeric(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

std::string serialize_dataset(const Dataset& ds, const std::string& missing_token,
                              int numeric_precision) {
    std::string out;
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.d(); ++j) {
            if (j) out += ',';
            const CellValue& c = ds.cell(i, j);
            switch (c.tag) {
                case CellValue::Tag::Missing:
                    out += missing_token;
                    break;
                case CellValue::Tag::Numeric:
                    out += format_numeric(c.num, numeric_precision);
                    break;
                case CellValue::Tag::Ordinal:
                    out += ds.schema.columns[j].kind.levels[static_cast<std::size_t>(c.id)];
                    break;
                case CellValue::Tag::Nominal:
                    out += ds.nominal_labels[j][static_cast<std::size_t>(c.id)];
                    break;
            }
        }
        out += '\n';
    }
    return out;
}

std::size_t AttributeCatalog::size() const {
    return cat_values.empty() ? bin_means.size() : cat_values.size();
}

ValueCatalog catalog_values(const Dataset& ds) {
    ValueCatalog catalog;
    catalog.attrs.resize(ds.d());
    for (std::size_t j = 0; j < ds.d(); ++j) {
        AttributeCatalog& ac = catalog.attrs[j];
        const Kind kind = ds.schema.columns[j].kind.kind;
        if (kind == Kind::Numerical) {
            std::vector<double> values;
            for (std::size_t i = 0; i < ds.n; ++i)
                if (!ds.cell(i, j).is_missing()) values.push_back(ds.cell(i, j).num);
            if (values.empty())
                throw DataError("column '" + ds.schema.columns[j].name + "' is fully missing");
            std::sort(values.begin(), values.end());
            ac.min = values.front();
            ac.max = values.back();
            std::vector<double> distinct = values;
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            ac.distinct = distinct.size();
            std::size_t bins = std::min<std::size_t>(5, distinct.size());
            // Equal-frequency cuts placed between distinct values: walk the
            // distinct list accumulating counts and cut once the cumulative
            // share reaches the next quantile (or when the remaining gaps
            // are all needed). Cutting between distinct values keeps every
            // bin non-empty no matter how lopsided the duplicates are.
            std::vector<std::size_t> dcount(distinct.size(), 0);
            {
                std::size_t t = 0;
                for (double v : values) {
                    while (distinct[t] != v) ++t;
                    dcount[t]++;
                }
            }
            const double total = static_cast<double>(values.size());
            std::size_t need = bins - 1;
            double acc = 0.0;
            for (std::size_t t = 0; t + 1 < distinct.size() && need > 0; ++t) {
                acc += static_cast<double>(dcount[t]);
                std::size_t gaps_left = distinct.size() - 1 - t;
                double target = total * static_cast<double>(bins - need) /
                                static_cast<double>(bins);
                if (gaps_left == need || acc >= target) {
                    ac.bin_edges.push_back((distinct[t] + distinct[t + 1]) / 2.0);
                    --need;
                }
            }
            ac.bin_means.assign(bins, 0.0);
            std::vector<std::size_t> counts(bins, 0);
            for (double v : values) {
                std::size_t b = static_cast<std::size_t>(
                    std::upper_bound(ac.bin_edges.begin(), ac.bin_edges.end(), v) -
                    ac.bin_edges.begin());
                ac.bin_means[b] += v;
                counts[b]++;
            }
            for (std::size_t b = 0; b < bins; ++b) {
                if (counts[b] == 0)
                    throw InternalError("empty equal-frequency bin in column '" +
                                        ds.schema.columns[j].name + "'");
                ac.bin_means[b] /= static_cast<double>(counts[b]);
            }
        } else {
            std::vector<int> seen;
            for (std::size_t i = 0; i < ds.n; ++i) {
                const CellValue& c = ds.cell(i, j);
                if (c.is_missing()) continue;
                if (std::find(seen.begin(), seen.end(), c.id) == seen.end()) seen.push_back(c.id);
            }
            if (seen.empty())
                throw DataError("column '" + ds.schema.columns[j].name + "' is fully missing");
            // Nominal ids are assigned in first-appearance order, so
            // ascending id order is first-appearance order; ordinal ranks
            // sort by level order.
            std::sort(seen.begin(), seen.end());
            ac.cat_values = std::move(seen);
            ac.distinct = ac.cat_values.size();
        }
    }
    return catalog;
}

int ValueCatalog::index_of(const Schema& schema, std::size_t attr, const CellValue& v) const {
    if (v.is_missing()) return -1;
    const AttributeCatalog& ac = attrs[attr];
    if (schema.columns[attr].kind.kind == Kind::Numerical) {
        return static_cast<int>(std::upper_bound(ac.bin_edges.begin(), ac.bin_edges.end(), v.num) -
                                ac.bin_edges.begin());
    }
    auto it = std::lower_bound(ac.cat_values.begin(), ac.cat_values.end(), v.id);
    if (it == ac.cat_values.end() || *it != v.id)
        throw InternalError("value not present in catalog for attribute " + std::to_string(attr));
    return static_cast<int>(it - ac.cat_values.begin());
}

CellValue ValueCatalog::value_at(const Schema& schema, std::size_t attr, std::size_t idx) const {
    const AttributeCatalog& ac = attrs[attr];
    switch (schema.columns[attr].kind.kind) {
        case Kind::Numerical:
            return CellValue::numeric(ac.bin_means[idx]);
        case Kind::Ordinal:
            return CellValue::ordinal(ac.cat_values[idx]);
        case Kind::Nominal:
            return CellValue::nominal(ac.cat_values[idx]);
    }
    throw InternalError("unreachable");
}

NormalizedDataset normalize_numeric(const Dataset& ds) {
    NormalizedDataset out;
    out.dataset = ds;
    out.ranges.resize(ds.d());
    for (std::size_t j = 0; j < ds.d(); ++j) {
        if (ds.schema.columns[j].kind.kind != Kind::Numerical) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ds.n; ++i) {
            const CellValue& c = ds.cell(i, j);
            if (c.is_missing()) continue;
            lo = std::min(lo, c.num);
            hi = std::max(hi, c.num);
        }
        if (!std::isfinite(lo)) continue;  // fully missing; catalog_values reports it
        out.ranges[j] = NumericRange{lo, hi};
        for (std::size_t i = 0; i < ds.n; ++i) {
            CellValue& c = out.dataset.cell(i, j);
            if (c.is_missing()) continue;
            c.num = (hi > lo) ? (c.num - lo) / (hi - lo) : 0.0;
        }
    }
    return out;
}

double denormalize(double v, const NumericRange& range) {
    return range.min + v * (range.max - range.min);
}

}  // namespace hmvi
