#ifndef SECTIONVIEW_DATASET_H_
#define SECTIONVIEW_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace sectionview {

enum class ColumnKind { kContinuous, kCategorical };

std::string_view to_string(ColumnKind kind);

// A single cell or predictor value: a real number for continuous variables,
// a level label for categorical ones.
using Value = std::variant<double, std::string>;

// Predictor assignment keyed by variable name.
using Row = std::map<std::string, Value, std::less<>>;

std::string format_value(const Value& v);

// Immutable typed column. Continuous cells are stored as doubles (NaN marks
// a missing cell); categorical cells as indices into `levels()` (-1 marks a
// missing cell).
class Column {
 public:
  static constexpr std::int32_t kMissingCode = -1;

  static Column continuous(std::string name, std::vector<double> values);
  // Throws SchemaError if a code is outside [-1, levels.size()) or levels
  // repeat.
  static Column categorical(std::string name, std::vector<std::int32_t> codes,
                            std::vector<std::string> levels);

  const std::string& name() const { return name_; }
  ColumnKind kind() const { return kind_; }
  bool is_continuous() const { return kind_ == ColumnKind::kContinuous; }
  bool is_categorical() const { return kind_ == ColumnKind::kCategorical; }
  std::size_t size() const;

  bool is_missing(std::size_t row) const;
  // Continuous accessors.
  double number(std::size_t row) const { return numbers_[row]; }
  const std::vector<double>& numbers() const { return numbers_; }
  // Categorical accessors.
  std::int32_t code(std::size_t row) const { return codes_[row]; }
  const std::vector<std::int32_t>& codes() const { return codes_; }
  const std::vector<std::string>& levels() const { return levels_; }
  // Index of `label` among the levels, if present.
  std::optional<std::int32_t> level_index(std::string_view label) const;

  // Cell as a Value; nullopt when missing.
  std::optional<Value> value(std::size_t row) const;
  std::size_t non_missing_count() const;

  // Observed [min, max] over non-missing values; nullopt if none.
  std::optional<std::pair<double, double>> range() const;

 private:
  Column() = default;

  std::string name_;
  ColumnKind kind_ = ColumnKind::kContinuous;
  std::vector<double> numbers_;
  std::vector<std::int32_t> codes_;
  std::vector<std::string> levels_;
};

class Dataset {
 public:
  // Throws SchemaError on duplicate names or unequal column lengths.
  explicit Dataset(std::vector<Column> columns);

  std::size_t rows() const { return rows_; }
  std::size_t num_columns() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  bool has(std::string_view name) const;
  // Throws UnknownVariable.
  const Column& column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t rows_ = 0;
};

using TypeHints = std::map<std::string, ColumnKind, std::less<>>;

// Reads RFC-4180 CSV with a header row. Untyped columns are categorical when
// any cell is non-numeric or when they hold at most 10 distinct integral
// values; otherwise continuous. Empty cells are missing.
Dataset load_csv(std::istream& source, const TypeHints& hints = {});
Dataset load_csv_file(const std::string& path, const TypeHints& hints = {});

struct ColumnScale {
  double mean = 0.0;
  double sd = 1.0;
  bool clamped = false;

  double standardize(double x) const { return (x - mean) / sd; }
};

// Mean and sample standard deviation of every continuous column. Standard
// deviations below 1e-12 are clamped to 1.
class StandardizationStats {
 public:
  StandardizationStats() = default;
  explicit StandardizationStats(std::map<std::string, ColumnScale, std::less<>> scales)
      : scales_(std::move(scales)) {}

  bool has(std::string_view name) const;
  const ColumnScale& at(std::string_view name) const;
  const std::map<std::string, ColumnScale, std::less<>>& scales() const {
    return scales_;
  }

 private:
  std::map<std::string, ColumnScale, std::less<>> scales_;
};

inline constexpr double kMinStandardDeviation = 1e-12;

StandardizationStats standardization_stats(const Dataset& d);

// --- Selector plot summaries -------------------------------------------------

// Number of observations above which a cont x cont selector becomes a 2-D
// histogram instead of a scatterplot.
inline constexpr std::size_t kScatterMaxRows = 2000;

struct Histogram {
  std::string var;
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  bool operator==(const Histogram&) const = default;
};

struct BarCounts {
  std::string var;
  std::vector<std::string> levels;
  std::vector<std::size_t> counts;
  bool operator==(const BarCounts&) const = default;
};

struct Hist2D {
  std::string x_var, y_var;
  std::vector<double> x_edges, y_edges;
  // counts[i][j]: x bin i, y bin j.
  std::vector<std::vector<std::size_t>> counts;
  bool operator==(const Hist2D&) const = default;
};

struct ScatterData {
  std::string x_var, y_var;
  std::vector<std::pair<double, double>> points;
  bool operator==(const ScatterData&) const = default;
};

struct FiveNumber {
  double min = 0, lower_quartile = 0, median = 0, upper_quartile = 0, max = 0;
  bool operator==(const FiveNumber&) const = default;
};

struct BoxplotStats {
  std::string value_var;  // continuous
  std::string group_var;  // categorical
  std::vector<std::string> levels;
  std::vector<std::size_t> counts;
  // nullopt for levels with no observations.
  std::vector<std::optional<FiveNumber>> boxes;
  bool operator==(const BoxplotStats&) const = default;
};

struct SpineData {
  std::string x_var, y_var;
  std::vector<std::string> x_levels, y_levels;
  // counts[i][j]: x level i, y level j.
  std::vector<std::vector<std::size_t>> counts;
  bool operator==(const SpineData&) const = default;
};

using SummaryPlotData =
    std::variant<Histogram, BarCounts, Hist2D, ScatterData, BoxplotStats,
                 SpineData>;

// Sturges' rule: ceil(log2(n) + 1), at least 1.
std::size_t sturges_bins(std::size_t n);

// Linear-interpolation quantile (type 7) of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

SummaryPlotData summarize(const Dataset& d, const std::vector<std::string>& vars);

// Median of a continuous column, or the modal level (ties to the lowest
// level index) of a categorical one. Throws ValidationError when the column
// has no observed values.
Value typical_value(const Column& c);

// Reads a condition value from text: a finite number for continuous
// columns, a known level label for categorical ones. Throws
// ValidationError otherwise.
Value parse_value(const Column& c, std::string_view text);

// Checks `v` against the column kind. Numbers given for a categorical
// column are matched against the level labels.
Value coerce_value(const Column& c, const Value& v);

}  // namespace sectionview

#endif  // SECTIONVIEW_DATASET_H_
