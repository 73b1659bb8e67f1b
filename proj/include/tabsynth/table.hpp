#ifndef TABSYNTH_TABLE_HPP
#define TABSYNTH_TABLE_HPP

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tabsynth/error.hpp"
#include "tabsynth/schema.hpp"

namespace tabsynth {

/// Calendar date as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;
  friend auto operator<=>(const Date&, const Date&) = default;
};

/// ISO-8601 calendar date (YYYY-MM-DD) only.
inline std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto ok = [](std::string_view s, auto& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  };
  if (!ok(text.substr(0, 4), y) || !ok(text.substr(5, 2), m) || !ok(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

inline std::string format_iso_date(Date date) {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{date.days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

/// monostate marks a missing cell. Continuous holds double, ordinal holds
/// int64, categorical/binary hold the label, date holds Date.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string, Date>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

/// Shortest text that parses back to the identical double.
inline std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

/// Checks that a non-missing cell has the right alternative and lies within
/// bounds/categories. Returns an explanation on failure.
inline std::optional<std::string> check_cell(const ColumnSpec& spec, const Cell& cell) {
  if (is_missing(cell)) return std::nullopt;
  switch (spec.kind) {
    case ColumnKind::continuous: {
      const auto* v = std::get_if<double>(&cell);
      if (!v) return "expected a real value";
      if (!std::isfinite(*v)) return "non-finite value";
      if (spec.bounds && !spec.bounds->contains(*v)) return "value outside bounds";
      return std::nullopt;
    }
    case ColumnKind::ordinal: {
      const auto* v = std::get_if<std::int64_t>(&cell);
      if (!v) return "expected an integer level";
      if (!spec.bounds->contains(static_cast<double>(*v))) return "level outside bounds";
      return std::nullopt;
    }
    case ColumnKind::categorical:
    case ColumnKind::binary: {
      const auto* v = std::get_if<std::string>(&cell);
      if (!v) return "expected a label";
      if (!spec.code_of(*v)) return "label '" + *v + "' not in category set";
      return std::nullopt;
    }
    case ColumnKind::date:
      if (!std::holds_alternative<Date>(cell)) return "expected a date";
      return std::nullopt;
  }
  return "unknown kind";
}

/// Parses CSV text for one cell. Empty text is missing.
inline Cell parse_cell(const ColumnSpec& spec, std::string_view text) {
  if (text.empty()) return std::monostate{};
  auto mismatch = [&](const std::string& why) -> Error {
    return Error(ErrorKind::TypeMismatch, spec.name + ": '" + std::string(text) + "' " + why);
  };
  Cell cell;
  switch (spec.kind) {
    case ColumnKind::continuous: {
      double v = 0.0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size()) throw mismatch("is not a number");
      cell = v;
      break;
    }
    case ColumnKind::ordinal: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size()) {
        // Accept integral reals such as "3.0" from spreadsheet exports.
        double d = 0.0;
        auto [p2, ec2] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec2 != std::errc{} || p2 != text.data() + text.size() || d != std::floor(d)) {
          throw mismatch("is not an integer level");
        }
        v = static_cast<std::int64_t>(d);
      }
      cell = v;
      break;
    }
    case ColumnKind::categorical:
    case ColumnKind::binary:
      cell = std::string(text);
      break;
    case ColumnKind::date: {
      auto d = parse_iso_date(text);
      if (!d) throw mismatch("is not an ISO-8601 date");
      cell = *d;
      break;
    }
  }
  if (auto why = check_cell(spec, cell)) throw mismatch(*why);
  return cell;
}

inline std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(Date v) const { return format_iso_date(v); }
  };
  return std::visit(Visitor{}, cell);
}

using Row = std::vector<Cell>;

/// Rectangular typed dataset. Immutable once built; every row is checked
/// against the schema on construction.
class Table {
 public:
  Table() = default;
  Table(Schema schema, std::vector<Row> rows) : schema_(std::move(schema)), rows_(std::move(rows)) {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].size() != schema_.size()) {
        throw Error(ErrorKind::InvalidArgument,
                    "row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                        " cells, schema has " + std::to_string(schema_.size()));
      }
      for (std::size_t c = 0; c < schema_.size(); ++c) {
        if (auto why = check_cell(schema_[c], rows_[r][c])) {
          throw Error(ErrorKind::TypeMismatch, "row " + std::to_string(r) + ", column " +
                                                   schema_[c].name + ": " + *why);
        }
      }
    }
  }

  const Schema& schema() const { return schema_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return schema_.size(); }
  const Cell& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }

  /// Numeric view of a column: real value, ordinal level, or binary code.
  std::vector<std::optional<double>> numeric_column(std::string_view name) const {
    const std::size_t c = schema_.require(name);
    const ColumnSpec& spec = schema_[c];
    if (!is_numeric_kind(spec.kind)) {
      throw Error(ErrorKind::NonNumericColumn, spec.name + " is " + std::string(to_string(spec.kind)));
    }
    std::vector<std::optional<double>> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) out.push_back(numeric_value(spec, row[c]));
    return out;
  }

  /// Non-missing numeric values only.
  std::vector<double> numeric_values(std::string_view name) const {
    std::vector<double> out;
    for (const auto& v : numeric_column(name)) {
      if (v) out.push_back(*v);
    }
    return out;
  }

  /// Label view for any discrete column (ordinal levels become decimal text).
  std::vector<std::optional<std::string>> label_column(std::string_view name) const {
    const std::size_t c = schema_.require(name);
    const ColumnSpec& spec = schema_[c];
    if (!is_discrete_kind(spec.kind)) {
      throw Error(ErrorKind::TypeMismatch, spec.name + " is not a discrete column");
    }
    std::vector<std::optional<std::string>> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
      const Cell& cell = row[c];
      if (is_missing(cell)) {
        out.emplace_back();
      } else if (const auto* lvl = std::get_if<std::int64_t>(&cell)) {
        out.emplace_back(std::to_string(*lvl));
      } else {
        out.emplace_back(std::get<std::string>(cell));
      }
    }
    return out;
  }

  std::vector<std::string> label_values(std::string_view name) const {
    std::vector<std::string> out;
    for (auto& v : label_column(name)) {
      if (v) out.push_back(std::move(*v));
    }
    return out;
  }

  /// Keeps only the named columns, in the given order.
  Table select(const std::vector<std::string>& names) const {
    std::vector<ColumnSpec> specs;
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
      idx.push_back(schema_.require(n));
      specs.push_back(schema_[idx.back()]);
    }
    std::vector<Row> rows;
    rows.reserve(rows_.size());
    for (const auto& row : rows_) {
      Row out;
      out.reserve(idx.size());
      for (auto i : idx) out.push_back(row[i]);
      rows.push_back(std::move(out));
    }
    return Table(Schema(std::move(specs)), std::move(rows));
  }

  friend bool operator==(const Table&, const Table&) = default;

  static std::optional<double> numeric_value(const ColumnSpec& spec, const Cell& cell) {
    if (is_missing(cell)) return std::nullopt;
    if (const auto* v = std::get_if<double>(&cell)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*v);
    if (const auto* v = std::get_if<std::string>(&cell)) {
      if (auto code = spec.code_of(*v)) return static_cast<double>(*code);
    }
    return std::nullopt;
  }

 private:
  Schema schema_;
  std::vector<Row> rows_;
};

}  // namespace tabsynth

#endif  // TABSYNTH_TABLE_HPP
