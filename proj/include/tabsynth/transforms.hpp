#ifndef TABSYNTH_TRANSFORMS_HPP
#define TABSYNTH_TRANSFORMS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/error.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

enum class Compare { lt, le, gt, ge, eq, ne };

inline bool compare(double lhs, Compare op, double rhs) {
  switch (op) {
    case Compare::lt: return lhs < rhs;
    case Compare::le: return lhs <= rhs;
    case Compare::gt: return lhs > rhs;
    case Compare::ge: return lhs >= rhs;
    case Compare::eq: return lhs == rhs;
    case Compare::ne: return lhs != rhs;
  }
  return false;
}

inline Compare parse_compare(std::string_view s) {
  if (s == "<" || s == "lt") return Compare::lt;
  if (s == "<=" || s == "le") return Compare::le;
  if (s == ">" || s == "gt") return Compare::gt;
  if (s == ">=" || s == "ge") return Compare::ge;
  if (s == "==" || s == "eq") return Compare::eq;
  if (s == "!=" || s == "ne") return Compare::ne;
  throw Error(ErrorKind::InvalidArgument, "unknown comparison '" + std::string(s) + "'");
}

/// Positive outcome iff (column - baseline) <op> threshold; baseline is
/// optional. KPS deterioration is {discharge, baseline preop, <, 0}.
struct ThresholdRule {
  Compare op = Compare::gt;
  double threshold = 0.0;
  std::optional<std::string> baseline;
};

struct Dichotomize {
  std::string column;
  ThresholdRule rule;
  /// Replaces the source column when unset.
  std::optional<std::string> out;
  /// {negative, positive}. Defaults to the source labels for binary input, else {"0","1"}.
  std::optional<std::vector<std::string>> labels;
};

struct DateDiffDays {
  std::string start;
  std::string end;
  std::string out;
};

struct SumComponents {
  std::vector<std::string> columns;
  std::string out;
};

struct NaturalLog {
  std::string column;
  std::string out;
};

struct RowPredicate {
  std::string column;
  /// nullopt means "cell is missing".
  std::optional<Compare> op;
  std::variant<double, std::string> value = 0.0;
};

struct DropRows {
  RowPredicate predicate;
};

struct DropColumns {
  std::vector<std::string> columns;
};

using Transform =
    std::variant<Dichotomize, DateDiffDays, SumComponents, NaturalLog, DropRows, DropColumns>;

namespace detail {

inline void check_fresh(const Schema& schema, const std::string& name) {
  if (schema.contains(name)) {
    throw Error(ErrorKind::ColumnCollision, "output column '" + name + "' already exists");
  }
}

inline Table append_column(const Table& t, ColumnSpec spec, std::vector<Cell> cells) {
  std::vector<ColumnSpec> specs = t.schema().columns();
  specs.push_back(std::move(spec));
  std::vector<Row> rows = t.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(std::move(cells[r]));
  return Table(Schema(std::move(specs)), std::move(rows));
}

inline Table replace_column(const Table& t, std::size_t index, ColumnSpec spec,
                            std::vector<Cell> cells) {
  std::vector<ColumnSpec> specs = t.schema().columns();
  specs[index] = std::move(spec);
  std::vector<Row> rows = t.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r][index] = std::move(cells[r]);
  return Table(Schema(std::move(specs)), std::move(rows));
}

inline Table apply(const Table& t, const Dichotomize& d) {
  const std::size_t src = t.schema().require(d.column);
  const ColumnSpec& spec = t.schema()[src];
  if (!is_numeric_kind(spec.kind)) {
    throw Error(ErrorKind::NonNumericColumn, "dichotomize: " + d.column + " is not numeric");
  }
  const auto values = t.numeric_column(d.column);
  std::vector<std::optional<double>> base;
  if (d.rule.baseline) base = t.numeric_column(*d.rule.baseline);

  std::vector<std::string> labels;
  if (d.labels) {
    labels = *d.labels;
  } else if (spec.kind == ColumnKind::binary) {
    labels = spec.categories;
  } else {
    labels = {"0", "1"};
  }
  ColumnSpec out_spec{d.out.value_or(d.column), ColumnKind::binary, std::nullopt, std::nullopt, labels};
  out_spec.validate();

  std::vector<Cell> cells(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (!values[r] || (d.rule.baseline && !base[r])) continue;
    const double x = *values[r] - (d.rule.baseline ? *base[r] : 0.0);
    cells[r] = labels[compare(x, d.rule.op, d.rule.threshold) ? 1 : 0];
  }
  if (d.out) {
    check_fresh(t.schema(), *d.out);
    return append_column(t, std::move(out_spec), std::move(cells));
  }
  return replace_column(t, src, std::move(out_spec), std::move(cells));
}

inline Table apply(const Table& t, const DateDiffDays& d) {
  const std::size_t a = t.schema().require(d.start);
  const std::size_t b = t.schema().require(d.end);
  for (auto idx : {a, b}) {
    if (t.schema()[idx].kind != ColumnKind::date) {
      throw Error(ErrorKind::TypeMismatch, "date_diff_days: " + t.schema()[idx].name + " is not a date");
    }
  }
  check_fresh(t.schema(), d.out);
  std::vector<Cell> cells(t.row_count());
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    const auto* s = std::get_if<Date>(&t.at(r, a));
    const auto* e = std::get_if<Date>(&t.at(r, b));
    if (s && e) cells[r] = static_cast<double>(e->days - s->days);
  }
  return append_column(t, ColumnSpec{d.out, ColumnKind::continuous, "days", std::nullopt, {}},
                       std::move(cells));
}

inline Table apply(const Table& t, const SumComponents& s) {
  if (s.columns.empty()) throw Error(ErrorKind::InvalidArgument, "sum_components needs columns");
  std::vector<std::vector<std::optional<double>>> parts;
  for (const auto& name : s.columns) {
    const ColumnSpec& spec = t.schema().at(name);
    if (spec.kind != ColumnKind::binary) {
      throw Error(ErrorKind::NonBinaryComponent, "sum_components: " + name + " is not binary");
    }
    parts.push_back(t.numeric_column(name));
  }
  check_fresh(t.schema(), s.out);
  std::vector<Cell> cells(t.row_count());
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    std::int64_t total = 0;
    bool complete = true;
    for (const auto& p : parts) {
      if (!p[r]) {
        complete = false;
        break;
      }
      total += static_cast<std::int64_t>(*p[r]);
    }
    if (complete) cells[r] = total;
  }
  ColumnSpec spec{s.out, ColumnKind::ordinal, std::nullopt,
                  Bounds{0.0, static_cast<double>(s.columns.size())}, {}};
  return append_column(t, std::move(spec), std::move(cells));
}

inline Table apply(const Table& t, const NaturalLog& l) {
  const ColumnSpec& spec = t.schema().at(l.column);
  if (spec.kind != ColumnKind::continuous && spec.kind != ColumnKind::ordinal) {
    throw Error(ErrorKind::NonNumericColumn, "natural_log: " + l.column + " is not numeric");
  }
  check_fresh(t.schema(), l.out);
  const auto values = t.numeric_column(l.column);
  std::vector<Cell> cells(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (!values[r]) continue;
    if (!(*values[r] > 0.0)) {
      throw Error(ErrorKind::NonPositiveValue, "natural_log: " + l.column + " row " +
                                                   std::to_string(r) + " has value " +
                                                   format_double(*values[r]));
    }
    cells[r] = std::log(*values[r]);
  }
  std::optional<std::string> unit;
  if (spec.unit) unit = "ln(" + *spec.unit + ")";
  return append_column(t, ColumnSpec{l.out, ColumnKind::continuous, unit, std::nullopt, {}},
                       std::move(cells));
}

inline bool matches(const Table& t, std::size_t row, std::size_t col, const RowPredicate& p) {
  const ColumnSpec& spec = t.schema()[col];
  const Cell& cell = t.at(row, col);
  if (!p.op) return is_missing(cell);
  if (is_missing(cell)) return false;
  if (const auto* label = std::get_if<std::string>(&p.value)) {
    const auto* have = std::get_if<std::string>(&cell);
    std::string text = have ? *have : format_cell(cell);
    if (*p.op == Compare::eq) return text == *label;
    if (*p.op == Compare::ne) return text != *label;
    throw Error(ErrorKind::InvalidArgument, "drop_rows: label predicates support only == and !=");
  }
  double x;
  if (const auto* d = std::get_if<Date>(&cell)) {
    x = d->days;
  } else {
    auto v = Table::numeric_value(spec, cell);
    if (!v) return false;
    x = *v;
  }
  return compare(x, *p.op, std::get<double>(p.value));
}

inline Table apply(const Table& t, const DropRows& d) {
  const std::size_t col = t.schema().require(d.predicate.column);
  std::vector<Row> kept;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (!matches(t, r, col, d.predicate)) kept.push_back(t.rows()[r]);
  }
  return Table(t.schema(), std::move(kept));
}

inline Table apply(const Table& t, const DropColumns& d) {
  for (const auto& name : d.columns) t.schema().require(name);
  std::vector<std::string> keep;
  for (const auto& spec : t.schema().columns()) {
    if (std::find(d.columns.begin(), d.columns.end(), spec.name) == d.columns.end()) {
      keep.push_back(spec.name);
    }
  }
  return t.select(keep);
}

}  // namespace detail

/// Applies transforms in order; the input table is never modified.
inline Table apply_transforms(const Table& table, const std::vector<Transform>& transforms) {
  Table current = table;
  for (const auto& tr : transforms) {
    current = std::visit([&](const auto& x) { return detail::apply(current, x); }, tr);
  }
  return current;
}

// JSON form: [{"op": "dichotomize", ...}, ...]; field names mirror the structs.

inline Transform transform_from_json(const nlohmann::json& j) {
  try {
    const std::string op = j.at("op").get<std::string>();
    if (op == "dichotomize") {
      Dichotomize d;
      d.column = j.at("column").get<std::string>();
      d.rule.op = parse_compare(j.value("compare", std::string(">")));
      d.rule.threshold = j.value("threshold", 0.0);
      if (j.contains("baseline")) d.rule.baseline = j["baseline"].get<std::string>();
      if (j.contains("out")) d.out = j["out"].get<std::string>();
      if (j.contains("labels")) d.labels = j["labels"].get<std::vector<std::string>>();
      return d;
    }
    if (op == "date_diff_days") {
      return DateDiffDays{j.at("start").get<std::string>(), j.at("end").get<std::string>(),
                          j.at("out").get<std::string>()};
    }
    if (op == "sum_components") {
      return SumComponents{j.at("columns").get<std::vector<std::string>>(),
                           j.at("out").get<std::string>()};
    }
    if (op == "natural_log") {
      return NaturalLog{j.at("column").get<std::string>(), j.at("out").get<std::string>()};
    }
    if (op == "drop_rows") {
      const auto& p = j.at("predicate");
      RowPredicate pred;
      pred.column = p.at("column").get<std::string>();
      if (p.value("missing", false)) {
        pred.op.reset();
      } else {
        pred.op = parse_compare(p.at("compare").get<std::string>());
        const auto& v = p.at("value");
        if (v.is_string()) {
          pred.value = v.get<std::string>();
        } else {
          pred.value = v.get<double>();
        }
      }
      return DropRows{pred};
    }
    if (op == "drop_columns") return DropColumns{j.at("columns").get<std::vector<std::string>>()};
    throw Error(ErrorKind::InvalidArgument, "unknown transform op '" + op + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("transform: ") + e.what());
  }
}

inline std::vector<Transform> transforms_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "transforms JSON must be an array");
  std::vector<Transform> out;
  for (const auto& item : j) out.push_back(transform_from_json(item));
  return out;
}

}  // namespace tabsynth

#endif  // TABSYNTH_TRANSFORMS_HPP
