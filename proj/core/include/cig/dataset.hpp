#pragma once

#include <span>
#include <string>
#include <vector>

namespace cig {

enum class ColumnKind { continuous, categorical };

struct ColumnType {
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::string> levels;  // categorical only; ordered, unique, >= 2
};

struct Column {
    std::string name;
    ColumnType type;
};

/// Typed n x p table of mixed continuous/categorical columns, stored
/// column-major. Continuous cells hold real values, categorical cells hold
/// 0-based level indices. Immutable after construction and safe to share
/// read-only across parallel workers.
class MixedDataset {
public:
    MixedDataset() = default;
    /// values[j] is column j with one entry per row. Checks shape and that
    /// every categorical cell indexes a declared level; the stronger
    /// ingestion-time invariants live in validate().
    MixedDataset(std::vector<Column> columns, std::vector<std::vector<double>> values);

    int n() const { return n_; }
    int p() const { return static_cast<int>(columns_.size()); }
    const Column& column(int j) const { return columns_[static_cast<std::size_t>(j)]; }
    const std::vector<Column>& columns() const { return columns_; }
    std::span<const double> values(int j) const { return values_[static_cast<std::size_t>(j)]; }
    double cell(int row, int j) const { return values_[static_cast<std::size_t>(j)][static_cast<std::size_t>(row)]; }
    bool is_categorical(int j) const { return column(j).type.kind == ColumnKind::categorical; }
    int n_levels(int j) const { return static_cast<int>(column(j).type.levels.size()); }

    /// New dataset holding the given rows (row indices may repeat). The
    /// result is not re-validated; subsamples may be degenerate.
    MixedDataset subset_rows(std::span<const std::size_t> rows) const;

    /// Enforces the full invariants: n >= 2, every continuous column has
    /// >= 2 distinct values, every categorical column observes >= 2 levels.
    /// Throws std::runtime_error naming the first offending column.
    void validate() const;

    /// True if column j cannot act as a regression response: a constant
    /// continuous column or a categorical column with < 2 observed levels.
    bool column_degenerate(int j) const;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<double>> values_;
    int n_ = 0;
};

/// Per-column record of the dichotomization rule applied.
struct SplitRule {
    ColumnKind source_kind = ColumnKind::continuous;
    bool passthrough = false;      // column was already -1/+1
    double median = 0.0;           // continuous: x <= median -> -1
    std::vector<int> neg_levels;   // categorical: sorted level indices mapping to -1
};

/// All-cells-in-{-1,+1} view of a MixedDataset, plus the split rules that
/// reproduce it deterministically from the source.
class BinaryDataset {
public:
    BinaryDataset(std::vector<std::string> names, std::vector<std::vector<double>> values,
                  std::vector<SplitRule> rules);

    int n() const { return n_; }
    int p() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    std::span<const double> values(int j) const { return values_[static_cast<std::size_t>(j)]; }
    const SplitRule& rule(int j) const { return rules_[static_cast<std::size_t>(j)]; }

    /// Re-applies the stored rules to a source dataset with the same schema.
    std::vector<std::vector<double>> apply(const MixedDataset& source) const;

    /// The same data as a MixedDataset of continuous -1/+1 columns, the form
    /// the logistic lasso learner consumes.
    MixedDataset as_mixed() const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> values_;
    std::vector<SplitRule> rules_;
    int n_ = 0;
};

/// Median split for continuous columns (ties at the median go to -1) and the
/// most balanced level bipartition for categorical columns, ties broken by
/// the lexicographically smallest -1 level set. Columns already in {-1,+1}
/// pass through unchanged.
BinaryDataset dichotomize(const MixedDataset& data);

struct IngestReport {
    int rows_dropped = 0;
};

/// Reads an RFC-4180 CSV whose header row matches the schema names. Rows
/// with any missing cell (empty string or "NA") are dropped; the survivors
/// must satisfy the full MixedDataset invariants.
MixedDataset ingest_csv(const std::string& path, const std::vector<Column>& schema,
                        IngestReport* report = nullptr);

/// JSON schema sidecar:
/// {"columns":[{"name":...,"kind":"continuous"|"categorical","levels":[...]}]}
std::vector<Column> read_schema_json(const std::string& path);
void write_schema_json(const std::string& path, const std::vector<Column>& schema);

void write_csv(const std::string& path, const MixedDataset& data);

}  // namespace cig
