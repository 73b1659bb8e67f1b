#ifndef TABSYNTH_PROMPTKIT_HPP
#define TABSYNTH_PROMPTKIT_HPP

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/csv.hpp"
#include "tabsynth/error.hpp"
#include "tabsynth/generator.hpp"
#include "tabsynth/numeric.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

// ---- prompt ----------------------------------------------------------------

inline constexpr std::string_view kPromptTemplateVersion = "tabsynth-prompt/1";

// Slots: {{N}} {{CONTINUOUS}} {{CATEGORICAL}} {{CORRELATIONS}} {{DERIVED}} {{COLUMNS}}.
// {{N}} must stay the only place the row count appears.
inline constexpr std::string_view kPromptTemplate =
    R"(Generate a synthetic tabular dataset of {{N}} patients.
Each row describes one patient. Reproduce the statistical properties below as closely as possible, without copying any real record.

Continuous parameters (mean, standard deviation, range):
{{CONTINUOUS}}
Categorical, ordinal and binary parameters (proportion of patients in each category):
{{CATEGORICAL}}
{{CORRELATIONS}}{{DERIVED}}Output format:
Return the complete dataset as one CSV table with a header row and exactly these columns, in this order: {{COLUMNS}}.
Fill every cell. Write category labels exactly as given above.
)";

namespace detail {

inline std::string fixed(double x, int precision) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, precision);
  (void)ec;
  std::string s(buf, p);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline void replace_slot(std::string& text, std::string_view slot, std::string_view value) {
  const auto pos = text.find(slot);
  if (pos == std::string::npos) throw Error(ErrorKind::InvalidArgument, "template lacks slot " + std::string(slot));
  text.replace(pos, slot.size(), value);
}

inline std::string unit_suffix(const ColumnSpec& spec) { return spec.unit ? " (" + *spec.unit + ")" : ""; }

inline std::string code_note(const ColumnSpec& spec) {
  if (spec.kind == ColumnKind::ordinal) return "";
  std::string out = " (";
  const auto labels = spec.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", " : "") + labels[i] + " = " + std::to_string(i);
  return out + ")";
}

}  // namespace detail

/// Plain-language generation prompt for `profile` asking for `n_target` rows.
/// Only the first sentence depends on n_target.
inline std::string emit_prompt(const StatisticalProfile& profile, std::size_t n_target) {
  if (n_target == 0) throw Error(ErrorKind::InvalidArgument, "n_target must be positive");

  std::map<std::string, const ExpInverse*> log_rule;
  for (const auto& r : profile.derived_rules) {
    if (const auto* e = std::get_if<ExpInverse>(&r)) log_rule[e->raw_out] = e;
  }

  std::string continuous, categorical;
  for (const auto& col : profile.columns) {
    const ColumnSpec& spec = col.spec;
    if (const auto* s = col.continuous()) {
      continuous += "- " + spec.name + detail::unit_suffix(spec) + ": mean " + detail::fixed(s->mean, 2) + ", SD " +
                    detail::fixed(s->sd, 2) + ", range " + detail::fixed(s->min, 2) + " to " +
                    detail::fixed(s->max, 2) + ".";
      const std::string places =
          s->decimals >= 0 ? " rounded to " + std::to_string(s->decimals) + " decimal places" : "";
      auto it = log_rule.find(spec.name);
      if (it != log_rule.end() && s->log_scale) {
        const auto& l = *s->log_scale;
        const std::string& ln = it->second->log_col;
        continuous += " The distribution is skewed: sample " + ln + " on the natural log scale with mean " +
                      detail::fixed(l.mean, 4) + ", SD " + detail::fixed(l.sd, 4) + ", range " +
                      detail::fixed(l.min, 4) + " to " + detail::fixed(l.max, 4) + ", then output " + spec.name +
                      " = exp(" + ln + ")" + places + ". Include both " + ln + " and " + spec.name + ".";
      } else if (!places.empty()) {
        continuous += " Values" + places + ".";
      }
      continuous += "\n";
    } else {
      const auto* c = col.categorical();
      categorical += "- " + spec.name;
      if (spec.kind == ColumnKind::ordinal) {
        categorical += " (ordinal, " + detail::fixed(spec.bounds->min, 0) + " to " +
                       detail::fixed(spec.bounds->max, 0) + ")";
      } else if (spec.kind == ColumnKind::binary) {
        categorical += " (binary)";
      }
      categorical += ":";
      for (std::size_t i = 0; i < c->proportions.size(); ++i) {
        categorical += (i ? ", " : " ") + c->proportions[i].first + " " +
                       detail::fixed(100.0 * c->proportions[i].second, 1) + "%";
      }
      categorical += ".\n";
    }
  }
  if (continuous.empty()) continuous = "- none\n";
  if (categorical.empty()) categorical = "- none\n";

  std::string correlations;
  if (!profile.flagged_correlations.empty()) {
    correlations = "Correlations:\n";
    for (const auto& f : profile.flagged_correlations) {
      correlations += "- Maintain a Pearson correlation of r = " + detail::fixed(f.r, 2) + " between " + f.col_a +
                      detail::code_note(profile.column(f.col_a).spec) + " and " + f.col_b +
                      detail::code_note(profile.column(f.col_b).spec) + ".\n";
    }
    correlations += "\n";
  }

  std::string derived;
  for (const auto& r : profile.derived_rules) {
    if (const auto* b = std::get_if<BmiToHeightWeight>(&r)) {
      derived += "- Add " + b->height_out + " (cm) and " + b->weight_out + " (kg) for each patient, consistent with " +
                 b->bmi_col + ". Round both to 2 decimal places.\n";
    }
  }
  if (!derived.empty()) derived = "Derived parameters:\n" + derived + "\n";

  std::string columns;
  for (const auto& name : output_schema(profile).names()) columns += (columns.empty() ? "" : ", ") + name;

  std::string text(kPromptTemplate);
  detail::replace_slot(text, "{{N}}", std::to_string(n_target));
  detail::replace_slot(text, "{{CONTINUOUS}}", continuous);
  detail::replace_slot(text, "{{CATEGORICAL}}", categorical);
  detail::replace_slot(text, "{{CORRELATIONS}}", correlations);
  detail::replace_slot(text, "{{DERIVED}}", derived);
  detail::replace_slot(text, "{{COLUMNS}}", columns);
  return text;
}

// ---- validation ------------------------------------------------------------

struct Violation {
  std::size_t row = 0;
  std::string column;
  std::string expected;
  std::string found;
};

struct StructuralCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RuleCheck {
  std::string rule;
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

struct ValidationReport {
  std::vector<StructuralCheck> structural;
  std::vector<Violation> missing_cells;
  std::vector<RuleCheck> calculation;
  std::vector<Violation> range;

  bool pass() const {
    for (const auto& s : structural) {
      if (!s.pass) return false;
    }
    for (const auto& c : calculation) {
      if (!c.pass()) return false;
    }
    return range.empty();
  }
};

namespace detail {

inline bool kinds_compatible(ColumnKind expected, ColumnKind found) {
  return expected == found || (expected == ColumnKind::binary && found == ColumnKind::categorical);
}

inline std::optional<double> real_at(const Table& t, std::size_t row, std::size_t col) {
  return Table::numeric_value(t.schema()[col], t.at(row, col));
}

}  // namespace detail

inline constexpr double kBmiTolerance = 0.01;
inline constexpr double kLogRangeTolerance = 1e-6;

/// Checks a generated dataset against its profile: column presence, row count,
/// completeness, BMI and exp/ln calculations, and value ranges. Never modifies
/// the table. A column whose kind conflicts with the profile is SchemaMismatch.
inline ValidationReport validate_dataset(const Table& table, const StatisticalProfile& profile,
                                         const std::vector<DerivedFeatureRule>& rules,
                                         std::optional<std::size_t> expected_rows = std::nullopt) {
  const Schema expected = output_schema(profile, rules);
  const Schema& have = table.schema();
  ValidationReport report;

  std::vector<std::string> missing;
  for (const auto& spec : expected.columns()) {
    const auto idx = have.index_of(spec.name);
    if (!idx) {
      missing.push_back(spec.name);
    } else if (!detail::kinds_compatible(spec.kind, have[*idx].kind)) {
      throw Error(ErrorKind::SchemaMismatch, spec.name + " is " + std::string(to_string(have[*idx].kind)) +
                                                 ", expected " + std::string(to_string(spec.kind)));
    }
  }
  std::string missing_text;
  for (const auto& m : missing) missing_text += (missing_text.empty() ? "" : ", ") + m;
  report.structural.push_back({"columns_present", missing.empty(),
                               missing.empty() ? "all " + std::to_string(expected.size()) + " columns present"
                                               : "missing: " + missing_text});

  const std::size_t want_rows = expected_rows.value_or(profile.n);
  report.structural.push_back({"row_count", table.row_count() == want_rows,
                               std::to_string(table.row_count()) + " rows, expected " + std::to_string(want_rows)});

  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < have.size(); ++c) {
      if (expected.contains(have[c].name) && is_missing(table.at(r, c))) {
        report.missing_cells.push_back({r, have[c].name, "a value", "missing"});
      }
    }
  }
  report.structural.push_back({"complete", report.missing_cells.empty(),
                               std::to_string(report.missing_cells.size()) + " missing cells"});

  auto col = [&](const std::string& name) { return have.index_of(name); };

  for (const auto& rule : rules) {
    if (const auto* b = std::get_if<BmiToHeightWeight>(&rule)) {
      RuleCheck check{"BMI = " + b->weight_out + " / (" + b->height_out + "/100)^2", {}};
      const auto ib = col(b->bmi_col), ih = col(b->height_out), iw = col(b->weight_out);
      if (ib && ih && iw) {
        for (std::size_t r = 0; r < table.row_count(); ++r) {
          const auto bmi = detail::real_at(table, r, *ib);
          const auto h = detail::real_at(table, r, *ih);
          const auto w = detail::real_at(table, r, *iw);
          if (!bmi || !h || !w) continue;
          const double m = *h / 100.0;
          const double computed = round_to(*w / (m * m), 2);
          if (!(std::abs(computed - round_to(*bmi, 2)) <= kBmiTolerance + 1e-9)) {
            check.violations.push_back({r, b->bmi_col, format_double(computed), format_double(*bmi)});
          }
        }
      }
      report.calculation.push_back(std::move(check));
    } else {
      const auto& e = std::get<ExpInverse>(rule);
      RuleCheck check{e.raw_out + " = exp(" + e.log_col + ")", {}};
      int decimals = -1;
      if (profile.has_column(e.raw_out)) {
        if (const auto* s = profile.column(e.raw_out).continuous()) decimals = s->decimals;
      }
      const auto ir = col(e.raw_out), il = col(e.log_col);
      if (ir && il) {
        for (std::size_t r = 0; r < table.row_count(); ++r) {
          const auto raw = detail::real_at(table, r, *ir);
          const auto ln = detail::real_at(table, r, *il);
          if (!raw || !ln) continue;
          const double back = std::exp(*ln);
          const double tol = decimals >= 0 ? 0.5 * std::pow(10.0, -decimals) + 1e-9 * std::max(1.0, std::abs(*raw))
                                           : 1e-6 * std::max(1.0, std::abs(*raw));
          if (!(std::abs(back - *raw) <= tol)) {
            check.violations.push_back({r, e.raw_out, format_double(back), format_double(*raw)});
          }
        }
      }
      report.calculation.push_back(std::move(check));
    }
  }

  // Range: profile columns against their summaries, log columns against the
  // log-scale range, derived height/weight against positivity.
  std::map<std::string, std::pair<double, double>> log_ranges;
  for (const auto& rule : rules) {
    if (const auto* e = std::get_if<ExpInverse>(&rule)) {
      if (!profile.has_column(e->raw_out)) continue;
      if (const auto* s = profile.column(e->raw_out).continuous()) {
        if (s->log_scale) {
          log_ranges[e->log_col] = {s->log_scale->min, s->log_scale->max};
        } else if (s->min > 0.0) {
          log_ranges[e->log_col] = {std::log(s->min), std::log(s->max)};
        }
      }
    }
  }
  for (std::size_t c = 0; c < have.size(); ++c) {
    const std::string& name = have[c].name;
    if (!expected.contains(name)) continue;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      const Cell& cell = table.at(r, c);
      if (is_missing(cell)) continue;
      if (profile.has_column(name)) {
        const ColumnProfile& cp = profile.column(name);
        if (const auto* s = cp.continuous()) {
          const double v = std::get<double>(cell);
          const double slack = 1e-9 * std::max({1.0, std::abs(s->min), std::abs(s->max)});
          if (v < s->min - slack || v > s->max + slack) {
            report.range.push_back(
                {r, name, "[" + format_double(s->min) + ", " + format_double(s->max) + "]", format_double(v)});
          }
        } else if (auto why = check_cell(cp.spec, cell)) {
          const auto labels = cp.spec.labels();
          std::string allowed;
          for (const auto& l : labels) allowed += (allowed.empty() ? "" : "|") + l;
          report.range.push_back({r, name, allowed, format_cell(cell)});
        }
      } else if (auto it = log_ranges.find(name); it != log_ranges.end()) {
        const double v = std::get<double>(cell);
        if (v < it->second.first - kLogRangeTolerance || v > it->second.second + kLogRangeTolerance) {
          report.range.push_back({r, name,
                                  "[" + format_double(it->second.first) + ", " + format_double(it->second.second) + "]",
                                  format_double(v)});
        }
      } else if (const auto* v = std::get_if<double>(&cell); v && !(*v > 0.0)) {
        report.range.push_back({r, name, "> 0", format_double(*v)});
      }
    }
  }
  return report;
}

/// Loads a CSV for validation. Unlike load_table, labels outside the profile's
/// category set and ordinal levels outside its bounds are kept so they can be
/// reported as range violations. A cell of the wrong type is SchemaMismatch.
inline Table load_for_validation(std::string_view csv_text, const StatisticalProfile& profile,
                                 const std::vector<DerivedFeatureRule>& rules) {
  const Schema expected = output_schema(profile, rules);
  const auto records = csv::parse(csv_text);
  if (records.empty()) throw Error(ErrorKind::ParseError, "CSV has no header row");
  const auto& header = records.front();

  std::vector<ColumnSpec> specs;
  for (const auto& spec : expected.columns()) {
    const auto it = std::find(header.begin(), header.end(), spec.name);
    if (it == header.end()) continue;
    const std::size_t pos = static_cast<std::size_t>(it - header.begin());
    ColumnSpec loose = spec;
    if (spec.kind == ColumnKind::continuous) {
      loose.bounds.reset();
    } else if (spec.kind == ColumnKind::ordinal) {
      double lo = spec.bounds->min, hi = spec.bounds->max;
      for (std::size_t r = 1; r < records.size(); ++r) {
        if (pos >= records[r].size() || records[r][pos].empty()) continue;
        std::int64_t v = 0;
        const auto& f = records[r][pos];
        auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec == std::errc{} && p == f.data() + f.size()) {
          lo = std::min(lo, static_cast<double>(v));
          hi = std::max(hi, static_cast<double>(v));
        }
      }
      loose.bounds = Bounds{lo, hi};
    } else if (is_discrete_kind(spec.kind)) {
      for (std::size_t r = 1; r < records.size(); ++r) {
        if (pos >= records[r].size() || records[r][pos].empty()) continue;
        const auto& f = records[r][pos];
        if (std::find(loose.categories.begin(), loose.categories.end(), f) == loose.categories.end()) {
          loose.categories.push_back(f);
        }
      }
      if (loose.kind == ColumnKind::binary && loose.categories.size() > 2) loose.kind = ColumnKind::categorical;
    }
    specs.push_back(std::move(loose));
  }
  LoadOptions opts;
  opts.allow_missing_columns = true;
  try {
    return table_from_csv_text(csv_text, Schema(std::move(specs)), opts);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::TypeMismatch) throw Error(ErrorKind::SchemaMismatch, e.what());
    throw;
  }
}

inline nlohmann::json validation_to_json(const ValidationReport& r) {
  auto violations = [](const std::vector<Violation>& vs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : vs) {
      a.push_back({{"row", v.row}, {"column", v.column}, {"expected", v.expected}, {"found", v.found}});
    }
    return a;
  };
  nlohmann::json structural = nlohmann::json::array();
  for (const auto& s : r.structural) structural.push_back({{"check", s.name}, {"pass", s.pass}, {"detail", s.detail}});
  nlohmann::json calc = nlohmann::json::array();
  for (const auto& c : r.calculation) {
    calc.push_back({{"rule", c.rule}, {"pass", c.pass()}, {"violations", violations(c.violations)}});
  }
  return {{"pass", r.pass()},
          {"structural", structural},
          {"missing_cells", violations(r.missing_cells)},
          {"calculation", calc},
          {"range", {{"pass", r.range.empty()}, {"violations", violations(r.range)}}}};
}

inline std::string validation_summary(const ValidationReport& r) {
  auto mark = [](bool ok) { return ok ? std::string("PASS") : std::string("FAIL"); };
  std::string out = "validation: " + mark(r.pass()) + "\n";
  for (const auto& s : r.structural) out += "  " + mark(s.pass) + "  " + s.name + ": " + s.detail + "\n";
  for (const auto& c : r.calculation) {
    out += "  " + mark(c.pass()) + "  " + c.rule + ": " + std::to_string(c.violations.size()) + " violations\n";
    for (const auto& v : c.violations) {
      out += "        row " + std::to_string(v.row) + ": expected " + v.expected + ", found " + v.found + "\n";
    }
  }
  out += "  " + mark(r.range.empty()) + "  range: " + std::to_string(r.range.size()) + " out-of-range cells\n";
  for (const auto& v : r.range) {
    out += "        row " + std::to_string(v.row) + ", " + v.column + ": expected " + v.expected + ", found " +
           v.found + "\n";
  }
  return out;
}

}  // namespace tabsynth

#endif  // TABSYNTH_PROMPTKIT_HPP
