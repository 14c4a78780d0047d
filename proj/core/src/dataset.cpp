#include "cig/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace cig {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

bool is_plus_minus_one(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == -1.0 || x == 1.0; });
}

}  // namespace

MixedDataset::MixedDataset(std::vector<Column> columns, std::vector<std::vector<double>> values)
    : columns_(std::move(columns)), values_(std::move(values)) {
    if (columns_.size() != values_.size())
        fail("dataset: column count does not match value columns");
    if (columns_.empty()) fail("dataset: no columns");
    n_ = static_cast<int>(values_[0].size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (static_cast<int>(values_[j].size()) != n_)
            fail("dataset: ragged column '" + columns_[j].name + "'");
        const auto& type = columns_[j].type;
        if (type.kind == ColumnKind::categorical) {
            if (type.levels.size() < 2)
                fail("dataset: categorical column '" + columns_[j].name + "' declares fewer than 2 levels");
            std::set<std::string> uniq(type.levels.begin(), type.levels.end());
            if (uniq.size() != type.levels.size())
                fail("dataset: duplicate level labels in column '" + columns_[j].name + "'");
            for (double v : values_[j]) {
                double idx;
                if (std::modf(v, &idx) != 0.0 || v < 0 || v >= static_cast<double>(type.levels.size()))
                    fail("dataset: cell in column '" + columns_[j].name + "' does not index a declared level");
            }
        }
    }
}

MixedDataset MixedDataset::subset_rows(std::span<const std::size_t> rows) const {
    std::vector<std::vector<double>> values(values_.size());
    for (std::size_t j = 0; j < values_.size(); ++j) {
        values[j].reserve(rows.size());
        for (std::size_t r : rows) values[j].push_back(values_[j][r]);
    }
    MixedDataset out;
    out.columns_ = columns_;
    out.values_ = std::move(values);
    out.n_ = static_cast<int>(rows.size());
    return out;
}

void MixedDataset::validate() const {
    if (n_ < 2) fail("dataset: fewer than 2 rows");
    for (int j = 0; j < p(); ++j) {
        if (column_degenerate(j))
            fail("degenerate column '" + column(j).name + "': fewer than 2 distinct values observed");
    }
}

bool MixedDataset::column_degenerate(int j) const {
    auto v = values(j);
    if (v.empty()) return true;
    for (double x : v)
        if (x != v[0]) return false;
    return true;
}

BinaryDataset::BinaryDataset(std::vector<std::string> names, std::vector<std::vector<double>> values,
                             std::vector<SplitRule> rules)
    : names_(std::move(names)), values_(std::move(values)), rules_(std::move(rules)) {
    if (names_.size() != values_.size() || names_.size() != rules_.size())
        fail("binary dataset: mismatched column metadata");
    n_ = values_.empty() ? 0 : static_cast<int>(values_[0].size());
    for (const auto& col : values_) {
        if (static_cast<int>(col.size()) != n_) fail("binary dataset: ragged column");
        if (!is_plus_minus_one(col)) fail("binary dataset: cell outside {-1,+1}");
    }
}

std::vector<std::vector<double>> BinaryDataset::apply(const MixedDataset& source) const {
    if (source.p() != p()) fail("binary dataset: source has different column count");
    std::vector<std::vector<double>> out(static_cast<std::size_t>(p()));
    for (int j = 0; j < p(); ++j) {
        const SplitRule& rule = rules_[static_cast<std::size_t>(j)];
        auto src = source.values(j);
        auto& col = out[static_cast<std::size_t>(j)];
        col.reserve(src.size());
        if (rule.passthrough) {
            col.assign(src.begin(), src.end());
        } else if (rule.source_kind == ColumnKind::continuous) {
            for (double x : src) col.push_back(x <= rule.median ? -1.0 : 1.0);
        } else {
            for (double x : src) {
                int level = static_cast<int>(x);
                bool neg = std::binary_search(rule.neg_levels.begin(), rule.neg_levels.end(), level);
                col.push_back(neg ? -1.0 : 1.0);
            }
        }
    }
    return out;
}

MixedDataset BinaryDataset::as_mixed() const {
    std::vector<Column> columns;
    columns.reserve(names_.size());
    for (const auto& name : names_) columns.push_back({name, {ColumnKind::continuous, {}}});
    return MixedDataset(columns, values_);
}

namespace {

double column_median(std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

// Most balanced bipartition of the observed levels; the -1 side is the
// lexicographically smallest (by sorted level indices) among ties. Declared
// but unobserved levels map to +1.
std::vector<int> best_bipartition(std::span<const double> cells, int n_levels) {
    std::vector<int> counts(static_cast<std::size_t>(n_levels), 0);
    for (double x : cells) counts[static_cast<std::size_t>(x)]++;
    std::vector<int> observed;
    for (int l = 0; l < n_levels; ++l)
        if (counts[static_cast<std::size_t>(l)] > 0) observed.push_back(l);

    const int k = static_cast<int>(observed.size());
    if (k < 2) fail("dichotomize: categorical column observes fewer than 2 levels");
    if (k > 25) fail("dichotomize: too many observed levels for exhaustive bipartition search");

    long best_imbalance = -1;
    std::vector<int> best_set;
    const int total = static_cast<int>(cells.size());
    for (unsigned mask = 1; mask + 1 < (1u << k); ++mask) {
        int neg = 0;
        for (int b = 0; b < k; ++b)
            if (mask & (1u << b)) neg += counts[static_cast<std::size_t>(observed[static_cast<std::size_t>(b)])];
        long imbalance = std::labs(2L * neg - total);
        if (best_imbalance >= 0 && imbalance > best_imbalance) continue;
        std::vector<int> set;
        for (int b = 0; b < k; ++b)
            if (mask & (1u << b)) set.push_back(observed[static_cast<std::size_t>(b)]);
        if (imbalance == best_imbalance &&
            !std::lexicographical_compare(set.begin(), set.end(), best_set.begin(), best_set.end()))
            continue;
        best_imbalance = imbalance;
        best_set = std::move(set);
    }
    return best_set;
}

}  // namespace

BinaryDataset dichotomize(const MixedDataset& data) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
    std::vector<SplitRule> rules;
    names.reserve(static_cast<std::size_t>(data.p()));

    for (int j = 0; j < data.p(); ++j) {
        const Column& col = data.column(j);
        names.push_back(col.name);
        auto src = data.values(j);
        SplitRule rule;
        rule.source_kind = col.type.kind;
        std::vector<double> out;
        out.reserve(src.size());

        if (col.type.kind == ColumnKind::continuous && is_plus_minus_one(src)) {
            rule.passthrough = true;
            out.assign(src.begin(), src.end());
        } else if (col.type.kind == ColumnKind::continuous) {
            rule.median = column_median(src);
            for (double x : src) out.push_back(x <= rule.median ? -1.0 : 1.0);
        } else {
            rule.neg_levels = best_bipartition(src, data.n_levels(j));
            for (double x : src) {
                bool neg = std::binary_search(rule.neg_levels.begin(), rule.neg_levels.end(),
                                              static_cast<int>(x));
                out.push_back(neg ? -1.0 : 1.0);
            }
        }
        values.push_back(std::move(out));
        rules.push_back(std::move(rule));
    }
    return BinaryDataset(std::move(names), std::move(values), std::move(rules));
}

namespace {

// RFC-4180 record reader; handles quoted fields, embedded quotes, commas and
// newlines, and a trailing CR.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(std::move(field));
    return true;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA"; }

}  // namespace

MixedDataset ingest_csv(const std::string& path, const std::vector<Column>& schema,
                        IngestReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open CSV file: " + path);
    if (schema.empty()) fail("empty schema");

    std::vector<std::string> fields;
    if (!read_record(in, fields)) fail("CSV file is empty: " + path);
    if (fields.size() != schema.size())
        fail("CSV header has " + std::to_string(fields.size()) + " columns, schema declares " +
             std::to_string(schema.size()));
    for (std::size_t j = 0; j < schema.size(); ++j)
        if (fields[j] != schema[j].name)
            fail("CSV header column " + std::to_string(j + 1) + " is '" + fields[j] +
                 "', schema expects '" + schema[j].name + "'");

    // Per-column level lookup for categorical columns.
    std::vector<std::unordered_map<std::string, int>> level_index(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j)
        if (schema[j].type.kind == ColumnKind::categorical)
            for (std::size_t l = 0; l < schema[j].type.levels.size(); ++l)
                level_index[j].emplace(schema[j].type.levels[l], static_cast<int>(l));

    std::vector<std::vector<double>> values(schema.size());
    int dropped = 0;
    int row_number = 1;  // 1-based data row counter (header excluded)
    while (read_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank trailing line
        if (fields.size() != schema.size())
            fail("row " + std::to_string(row_number) + " has " + std::to_string(fields.size()) +
                 " fields, expected " + std::to_string(schema.size()));
        bool missing = std::any_of(fields.begin(), fields.end(),
                                   [](const std::string& f) { return is_missing(f); });
        if (missing) {
            ++dropped;
            ++row_number;
            continue;
        }
        for (std::size_t j = 0; j < schema.size(); ++j) {
            if (schema[j].type.kind == ColumnKind::continuous) {
                const std::string& f = fields[j];
                char* end = nullptr;
                double v = std::strtod(f.c_str(), &end);
                if (end == f.c_str() || *end != '\0')
                    fail("schema error: column '" + schema[j].name + "', row " +
                         std::to_string(row_number) + ": cannot parse '" + f + "' as a number");
                values[j].push_back(v);
            } else {
                auto it = level_index[j].find(fields[j]);
                if (it == level_index[j].end())
                    fail("schema error: column '" + schema[j].name + "', row " +
                         std::to_string(row_number) + ": unknown level '" + fields[j] + "'");
                values[j].push_back(static_cast<double>(it->second));
            }
        }
        ++row_number;
    }

    if (report != nullptr) report->rows_dropped = dropped;
    if (values[0].empty()) fail("no rows remain after casewise deletion");

    MixedDataset data(schema, std::move(values));
    data.validate();
    return data;
}

std::vector<Column> read_schema_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open schema file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail("schema JSON parse error in " + path + ": " + e.what());
    }
    if (!doc.contains("columns") || !doc["columns"].is_array())
        fail("schema JSON must contain a 'columns' array");

    std::vector<Column> schema;
    for (const auto& c : doc["columns"]) {
        Column col;
        if (!c.contains("name") || !c.contains("kind"))
            fail("schema JSON column entries need 'name' and 'kind'");
        col.name = c["name"].get<std::string>();
        std::string kind = c["kind"].get<std::string>();
        if (kind == "continuous") {
            col.type.kind = ColumnKind::continuous;
        } else if (kind == "categorical") {
            col.type.kind = ColumnKind::categorical;
            if (!c.contains("levels") || !c["levels"].is_array())
                fail("categorical column '" + col.name + "' needs a 'levels' array");
            for (const auto& l : c["levels"]) col.type.levels.push_back(l.get<std::string>());
        } else {
            fail("schema JSON: unknown kind '" + kind + "' for column '" + col.name + "'");
        }
        schema.push_back(std::move(col));
    }
    if (schema.empty()) fail("schema JSON declares no columns");
    return schema;
}

void write_schema_json(const std::string& path, const std::vector<Column>& schema) {
    nlohmann::ordered_json doc;
    doc["columns"] = nlohmann::ordered_json::array();
    for (const auto& col : schema) {
        nlohmann::ordered_json c;
        c["name"] = col.name;
        c["kind"] = col.type.kind == ColumnKind::continuous ? "continuous" : "categorical";
        if (col.type.kind == ColumnKind::categorical) c["levels"] = col.type.levels;
        doc["columns"].push_back(std::move(c));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write schema file: " + path);
    out << doc.dump(2) << "\n";
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const std::string& path, const MixedDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write CSV file: " + path);
    for (int j = 0; j < data.p(); ++j) {
        if (j > 0) out << ',';
        out << csv_escape(data.column(j).name);
    }
    out << '\n';
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.p(); ++j) {
            if (j > 0) out << ',';
            if (data.is_categorical(j)) {
                int level = static_cast<int>(data.cell(i, j));
                out << csv_escape(data.column(j).type.levels[static_cast<std::size_t>(level)]);
            } else {
                out << format_double(data.cell(i, j));
            }
        }
        out << '\n';
    }
}

}  // namespace cig
