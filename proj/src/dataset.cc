#include "sectionview/dataset.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "sectionview/errors.h"

namespace sectionview {

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::kContinuous ? "continuous" : "categorical";
}

std::string format_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(v);
  return os.str();
}

// --- Column ------------------------------------------------------------------

Column Column::continuous(std::string name, std::vector<double> values) {
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::kContinuous;
  c.numbers_ = std::move(values);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::int32_t> codes,
                           std::vector<std::string> levels) {
  std::set<std::string_view> seen;
  for (const auto& l : levels) {
    if (!seen.insert(l).second) {
      throw SchemaError("column '" + name + "' repeats level '" + l + "'");
    }
  }
  const auto n_levels = static_cast<std::int32_t>(levels.size());
  for (auto code : codes) {
    if (code < kMissingCode || code >= n_levels) {
      throw SchemaError("column '" + name + "' has level code " +
                        std::to_string(code) + " outside its " +
                        std::to_string(n_levels) + " levels");
    }
  }
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::kCategorical;
  c.codes_ = std::move(codes);
  c.levels_ = std::move(levels);
  return c;
}

std::size_t Column::size() const {
  return is_continuous() ? numbers_.size() : codes_.size();
}

bool Column::is_missing(std::size_t row) const {
  return is_continuous() ? std::isnan(numbers_[row])
                         : codes_[row] == kMissingCode;
}

std::optional<std::int32_t> Column::level_index(std::string_view label) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] == label) return static_cast<std::int32_t>(i);
  }
  return std::nullopt;
}

std::optional<Value> Column::value(std::size_t row) const {
  if (is_missing(row)) return std::nullopt;
  if (is_continuous()) return Value(numbers_[row]);
  return Value(levels_[static_cast<std::size_t>(codes_[row])]);
}

std::size_t Column::non_missing_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i) n += is_missing(i) ? 0 : 1;
  return n;
}

std::optional<std::pair<double, double>> Column::range() const {
  if (!is_continuous()) return std::nullopt;
  std::optional<std::pair<double, double>> r;
  for (double x : numbers_) {
    if (std::isnan(x)) continue;
    if (!r) {
      r.emplace(x, x);
    } else {
      r->first = std::min(r->first, x);
      r->second = std::max(r->second, x);
    }
  }
  return r;
}

// --- Dataset -----------------------------------------------------------------

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    if (c.size() != rows_) {
      throw SchemaError("column '" + c.name() + "' has " +
                        std::to_string(c.size()) + " rows, expected " +
                        std::to_string(rows_));
    }
    if (!index_.emplace(c.name(), i).second) {
      throw SchemaError("duplicate column name '" + c.name() + "'");
    }
  }
}

bool Dataset::has(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

std::size_t Dataset::column_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw UnknownVariable(std::string(name));
  return it->second;
}

const Column& Dataset::column(std::string_view name) const {
  return columns_[column_index(name)];
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name());
  return out;
}

// --- CSV ---------------------------------------------------------------------

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t number = 0;  // 1-based physical record number
};

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits RFC-4180 text into records. Quoted fields may contain separators,
// newlines and doubled quotes. Unquoted fields are whitespace-trimmed.
std::vector<Record> split_records(const std::string& text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool quoted_field = false;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t record_no = 1;
  current.number = record_no;

  const auto finish_field = [&] {
    current.fields.push_back(quoted_field ? field
                                          : std::string(trim(field)));
    field.clear();
    quoted_field = false;
  };
  const auto finish_record = [&] {
    if (record_has_content) {
      finish_field();
      records.push_back(std::move(current));
    }
    current = Record{};
    field.clear();
    quoted_field = false;
    record_has_content = false;
    current.number = ++record_no;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty()) {
          throw ParseError(record_no, "unexpected quote inside unquoted field");
        }
        field.clear();
        in_quotes = true;
        quoted_field = true;
        record_has_content = true;
        break;
      case ',':
        finish_field();
        record_has_content = true;
        break;
      case '\n':
        finish_record();
        break;
      default:
        if (quoted_field) {
          if (c != ' ' && c != '\t' && c != '\r') {
            throw ParseError(record_no, "text after closing quote");
          }
        } else {
          field.push_back(c);
          if (c != '\r') record_has_content = true;
        }
    }
  }
  if (in_quotes) throw ParseError(record_no, "unterminated quoted field");
  finish_record();
  return records;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double out = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    return std::nullopt;
  }
  return out;
}

constexpr std::size_t kMaxIntegralLevels = 10;

Column build_column(const std::string& name,
                    const std::vector<std::optional<std::string>>& cells,
                    std::optional<ColumnKind> hint) {
  std::vector<std::optional<double>> parsed(cells.size());
  bool all_numeric = true;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) continue;
    parsed[i] = parse_number(*cells[i]);
    if (!parsed[i]) all_numeric = false;
  }

  ColumnKind kind;
  if (hint) {
    kind = *hint;
  } else if (!all_numeric) {
    kind = ColumnKind::kCategorical;
  } else {
    std::set<double> distinct;
    bool integral = true;
    for (const auto& p : parsed) {
      if (!p) continue;
      distinct.insert(*p);
      if (*p != std::floor(*p)) integral = false;
    }
    kind = (!distinct.empty() && integral &&
            distinct.size() <= kMaxIntegralLevels)
               ? ColumnKind::kCategorical
               : ColumnKind::kContinuous;
  }

  if (kind == ColumnKind::kContinuous) {
    if (!all_numeric) {
      throw SchemaError("column '" + name +
                        "' is typed continuous but holds non-numeric values");
    }
    std::vector<double> values(cells.size(),
                               std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (parsed[i]) values[i] = *parsed[i];
    }
    return Column::continuous(name, std::move(values));
  }

  // Levels sort numerically when every label is a number, else
  // lexicographically.
  std::vector<std::string> levels;
  {
    std::set<std::string> unique;
    for (const auto& c : cells) {
      if (c) unique.insert(*c);
    }
    levels.assign(unique.begin(), unique.end());
    if (all_numeric) {
      std::stable_sort(levels.begin(), levels.end(),
                       [](const std::string& a, const std::string& b) {
                         return *parse_number(a) < *parse_number(b);
                       });
    }
  }
  std::map<std::string_view, std::int32_t> lookup;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    lookup.emplace(levels[i], static_cast<std::int32_t>(i));
  }
  std::vector<std::int32_t> codes(cells.size(), Column::kMissingCode);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) codes[i] = lookup.at(*cells[i]);
  }
  return Column::categorical(name, std::move(codes), std::move(levels));
}

}  // namespace

Dataset load_csv(std::istream& source, const TypeHints& hints) {
  std::string text{std::istreambuf_iterator<char>(source),
                   std::istreambuf_iterator<char>()};
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    text.erase(0, 3);
  }
  auto records = split_records(text);
  if (records.empty()) throw SchemaError("missing header row");

  const auto& header = records.front().fields;
  {
    std::set<std::string_view> seen;
    for (const auto& h : header) {
      if (h.empty()) throw SchemaError("empty column name in header");
      if (!seen.insert(h).second) {
        throw SchemaError("duplicate column name '" + h + "'");
      }
    }
  }
  for (const auto& [name, kind] : hints) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw SchemaError("type hint for unknown column '" + name + "'");
    }
  }
  if (records.size() < 2) throw SchemaError("no data rows");

  const std::size_t width = header.size();
  std::vector<std::vector<std::optional<std::string>>> cells(width);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != width) {
      throw ParseError(rec.number, "expected " + std::to_string(width) +
                                       " fields, found " +
                                       std::to_string(rec.fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (rec.fields[c].empty()) {
        cells[c].emplace_back(std::nullopt);
      } else {
        cells[c].emplace_back(rec.fields[c]);
      }
    }
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    std::optional<ColumnKind> hint;
    if (auto it = hints.find(header[c]); it != hints.end()) hint = it->second;
    columns.push_back(build_column(header[c], cells[c], hint));
  }
  return Dataset(std::move(columns));
}

Dataset load_csv_file(const std::string& path, const TypeHints& hints) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return load_csv(in, hints);
}

// --- Standardization ---------------------------------------------------------

bool StandardizationStats::has(std::string_view name) const {
  return scales_.find(name) != scales_.end();
}

const ColumnScale& StandardizationStats::at(std::string_view name) const {
  auto it = scales_.find(name);
  if (it == scales_.end()) throw UnknownVariable(std::string(name));
  return it->second;
}

StandardizationStats standardization_stats(const Dataset& d) {
  std::map<std::string, ColumnScale, std::less<>> scales;
  for (const auto& c : d.columns()) {
    if (!c.is_continuous()) continue;
    double sum = 0;
    std::size_t n = 0;
    for (double x : c.numbers()) {
      if (std::isnan(x)) continue;
      sum += x;
      ++n;
    }
    ColumnScale s;
    s.mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    double ss = 0;
    for (double x : c.numbers()) {
      if (!std::isnan(x)) ss += (x - s.mean) * (x - s.mean);
    }
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (sd < kMinStandardDeviation) {
      s.sd = 1.0;
      s.clamped = true;
    } else {
      s.sd = sd;
    }
    scales.emplace(c.name(), s);
  }
  return StandardizationStats(std::move(scales));
}

// --- Summaries ---------------------------------------------------------------

std::size_t sturges_bins(std::size_t n) {
  if (n <= 1) return 1;
  return static_cast<std::size_t>(
      std::ceil(std::log2(static_cast<double>(n)) + 1.0));
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

std::vector<double> equal_edges(double lo, double hi, std::size_t bins) {
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(bins);
  }
  edges.back() = hi;
  return edges;
}

// Bins are [e_i, e_{i+1}) except the last, which is closed.
std::size_t bin_of(const std::vector<double>& edges, double x) {
  const std::size_t bins = edges.size() - 1;
  auto it = std::upper_bound(edges.begin(), edges.end(), x);
  auto idx = static_cast<std::size_t>(std::distance(edges.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, bins - 1);
}

Histogram make_histogram(const Column& c) {
  Histogram h;
  h.var = c.name();
  const auto r = c.range();
  const std::size_t n = c.non_missing_count();
  if (!r) {
    h.edges = {0.0, 1.0};
    h.counts = {0};
    return h;
  }
  h.edges = equal_edges(r->first, r->second, sturges_bins(n));
  h.counts.assign(h.edges.size() - 1, 0);
  for (double x : c.numbers()) {
    if (!std::isnan(x)) ++h.counts[bin_of(h.edges, x)];
  }
  return h;
}

BarCounts make_bars(const Column& c) {
  BarCounts b;
  b.var = c.name();
  b.levels = c.levels();
  b.counts.assign(c.levels().size(), 0);
  for (auto code : c.codes()) {
    if (code != Column::kMissingCode) ++b.counts[static_cast<std::size_t>(code)];
  }
  return b;
}

SummaryPlotData make_cont_pair(const Dataset& d, const Column& x,
                               const Column& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (x.is_missing(i) || y.is_missing(i)) continue;
    pts.emplace_back(x.number(i), y.number(i));
  }
  if (d.rows() <= kScatterMaxRows) {
    return ScatterData{x.name(), y.name(), std::move(pts)};
  }
  Hist2D h;
  h.x_var = x.name();
  h.y_var = y.name();
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!pts.empty()) {
    x_lo = x_hi = pts.front().first;
    y_lo = y_hi = pts.front().second;
    for (const auto& [px, py] : pts) {
      x_lo = std::min(x_lo, px);
      x_hi = std::max(x_hi, px);
      y_lo = std::min(y_lo, py);
      y_hi = std::max(y_hi, py);
    }
  }
  const std::size_t bins = sturges_bins(pts.size());
  h.x_edges = equal_edges(x_lo, x_hi, bins);
  h.y_edges = equal_edges(y_lo, y_hi, bins);
  h.counts.assign(bins, std::vector<std::size_t>(bins, 0));
  for (const auto& [px, py] : pts) {
    ++h.counts[bin_of(h.x_edges, px)][bin_of(h.y_edges, py)];
  }
  return h;
}

BoxplotStats make_boxplot(const Dataset& d, const Column& value,
                          const Column& group) {
  BoxplotStats b;
  b.value_var = value.name();
  b.group_var = group.name();
  b.levels = group.levels();
  std::vector<std::vector<double>> per_level(group.levels().size());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (value.is_missing(i) || group.is_missing(i)) continue;
    per_level[static_cast<std::size_t>(group.code(i))].push_back(
        value.number(i));
  }
  for (auto& v : per_level) {
    b.counts.push_back(v.size());
    if (v.empty()) {
      b.boxes.emplace_back(std::nullopt);
      continue;
    }
    std::sort(v.begin(), v.end());
    b.boxes.push_back(FiveNumber{v.front(), quantile_sorted(v, 0.25),
                                 quantile_sorted(v, 0.5),
                                 quantile_sorted(v, 0.75), v.back()});
  }
  return b;
}

SpineData make_spine(const Dataset& d, const Column& x, const Column& y) {
  SpineData s;
  s.x_var = x.name();
  s.y_var = y.name();
  s.x_levels = x.levels();
  s.y_levels = y.levels();
  s.counts.assign(x.levels().size(),
                  std::vector<std::size_t>(y.levels().size(), 0));
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (x.is_missing(i) || y.is_missing(i)) continue;
    ++s.counts[static_cast<std::size_t>(x.code(i))]
              [static_cast<std::size_t>(y.code(i))];
  }
  return s;
}

}  // namespace

SummaryPlotData summarize(const Dataset& d,
                          const std::vector<std::string>& vars) {
  if (vars.empty() || vars.size() > 2) {
    throw ValidationError("summaries take one or two variables");
  }
  const Column& a = d.column(vars[0]);
  if (vars.size() == 1) {
    if (a.is_continuous()) return make_histogram(a);
    return make_bars(a);
  }
  const Column& b = d.column(vars[1]);
  if (a.name() == b.name()) {
    throw ValidationError("bivariate summary of '" + a.name() +
                          "' with itself");
  }
  if (a.is_continuous() && b.is_continuous()) return make_cont_pair(d, a, b);
  if (a.is_categorical() && b.is_categorical()) return make_spine(d, a, b);
  if (a.is_continuous()) return make_boxplot(d, a, b);
  return make_boxplot(d, b, a);
}

Value typical_value(const Column& c) {
  if (c.is_continuous()) {
    std::vector<double> v;
    for (double x : c.numbers()) {
      if (!std::isnan(x)) v.push_back(x);
    }
    if (v.empty()) {
      throw ValidationError("column '" + c.name() + "' has no observations");
    }
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
  }
  std::vector<std::size_t> counts(c.levels().size(), 0);
  for (auto code : c.codes()) {
    if (code != Column::kMissingCode) ++counts[static_cast<std::size_t>(code)];
  }
  if (counts.empty() || *std::max_element(counts.begin(), counts.end()) == 0) {
    throw ValidationError("column '" + c.name() + "' has no observations");
  }
  const auto best = std::max_element(counts.begin(), counts.end());
  return c.levels()[static_cast<std::size_t>(best - counts.begin())];
}

Value parse_value(const Column& c, std::string_view text) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  if (c.is_continuous()) {
    const auto x = parse_number(t);
    if (!x) {
      throw ValidationError("value '" + std::string(t) + "' for '" + c.name() +
                            "' is not a number");
    }
    return *x;
  }
  return coerce_value(c, std::string(t));
}

Value coerce_value(const Column& c, const Value& v) {
  if (c.is_continuous()) {
    const auto* x = std::get_if<double>(&v);
    if (x == nullptr || !std::isfinite(*x)) {
      throw ValidationError("value for '" + c.name() + "' must be a finite number");
    }
    return v;
  }
  if (const auto* label = std::get_if<std::string>(&v)) {
    if (!c.level_index(*label)) {
      throw ValidationError("'" + *label + "' is not a level of '" + c.name() + "'");
    }
    return v;
  }
  const double x = std::get<double>(v);
  for (const auto& level : c.levels()) {
    const auto n = parse_number(level);
    if (n && *n == x) return level;
  }
  throw ValidationError("'" + format_value(v) + "' is not a level of '" + c.name() + "'");
}

}  // namespace sectionview
