#ifndef TABSYNTH_PROFILE_HPP
#define TABSYNTH_PROFILE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/error.hpp"
#include "tabsynth/numeric.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

/// Prefix for natural-log companion columns ("Age" -> "ln_Age").
inline constexpr std::string_view kLogPrefix = "ln_";

inline std::string log_column_name(std::string_view raw) {
  return std::string(kLogPrefix) + std::string(raw);
}

struct LogScaleSummary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const LogScaleSummary&, const LogScaleSummary&) = default;
};

struct ContinuousSummary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;
  bool log_recommended = false;
  std::optional<LogScaleSummary> log_scale;
  /// Decimal places observed in the source values; -1 when finer than 1e-6.
  int decimals = -1;
  friend bool operator==(const ContinuousSummary&, const ContinuousSummary&) = default;
};

struct CategoricalSummary {
  /// Label -> proportion, in the column's category order.
  std::vector<std::pair<std::string, double>> proportions;

  double proportion(std::string_view label) const {
    for (const auto& [l, p] : proportions) {
      if (l == label) return p;
    }
    return 0.0;
  }
  friend bool operator==(const CategoricalSummary&, const CategoricalSummary&) = default;
};

struct CorrelationEntry {
  std::string col_a;
  std::string col_b;
  double r = 0.0;
  friend bool operator==(const CorrelationEntry&, const CorrelationEntry&) = default;
};

/// Height and weight drawn for each row so that weight / (height/100)^2 == BMI.
struct BmiToHeightWeight {
  std::string bmi_col;
  std::string height_out;
  std::string weight_out;
  friend bool operator==(const BmiToHeightWeight&, const BmiToHeightWeight&) = default;
};

/// The ln-scale column is sampled; raw_out = exp(log_col).
struct ExpInverse {
  std::string log_col;
  std::string raw_out;
  friend bool operator==(const ExpInverse&, const ExpInverse&) = default;
};

using DerivedFeatureRule = std::variant<BmiToHeightWeight, ExpInverse>;

struct ColumnProfile {
  ColumnSpec spec;
  std::variant<ContinuousSummary, CategoricalSummary> summary;
  std::size_t observed = 0;

  const ContinuousSummary* continuous() const { return std::get_if<ContinuousSummary>(&summary); }
  const CategoricalSummary* categorical() const { return std::get_if<CategoricalSummary>(&summary); }
  friend bool operator==(const ColumnProfile&, const ColumnProfile&) = default;
};

struct StatisticalProfile {
  std::size_t n = 0;
  double correlation_threshold = 0.5;
  std::vector<ColumnProfile> columns;
  std::vector<CorrelationEntry> flagged_correlations;
  std::vector<DerivedFeatureRule> derived_rules;

  const ColumnProfile& column(std::string_view name) const {
    for (const auto& c : columns) {
      if (c.spec.name == name) return c;
    }
    throw Error(ErrorKind::UnknownColumn, "profile has no column '" + std::string(name) + "'");
  }
  bool has_column(std::string_view name) const {
    return std::any_of(columns.begin(), columns.end(),
                       [&](const ColumnProfile& c) { return c.spec.name == name; });
  }
  friend bool operator==(const StatisticalProfile&, const StatisticalProfile&) = default;
};

/// Smallest number of decimals (0..6) that represents every value exactly.
inline int infer_decimals(std::span<const double> values) {
  for (int d = 0; d <= 6; ++d) {
    const bool fits = std::all_of(values.begin(), values.end(), [d](double v) {
      return std::abs(round_to(v, d) - v) <= 1e-9 * std::max(1.0, std::abs(v));
    });
    if (fits) return d;
  }
  return -1;
}

namespace detail {

inline ContinuousSummary moments(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw Error(ErrorKind::TooFewValues,
                "summarize_continuous needs >= 2 values, got " + std::to_string(n));
  }
  ContinuousSummary s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;

  double mean = mean_of(values);
  double correction = 0.0;
  for (double x : values) correction += x - mean;
  mean += correction / static_cast<double>(n);
  s.mean = std::clamp(mean, s.min, s.max);

  double m2 = 0.0, m3 = 0.0;
  for (double x : values) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double nd = static_cast<double>(n);
  s.sd = (s.min == s.max) ? 0.0 : std::sqrt(m2 / (nd - 1.0));
  if (n >= 3 && s.min != s.max && m2 > 0.0) {
    const double pm2 = m2 / nd;
    const double pm3 = m3 / nd;
    const double g1 = pm3 / std::pow(pm2, 1.5);
    s.skewness = std::sqrt(nd * (nd - 1.0)) / (nd - 2.0) * g1;
  }
  s.decimals = infer_decimals(values);
  return s;
}

}  // namespace detail

/// Attaches the ln-scale summary; requires all values > 0.
inline void attach_log_scale(ContinuousSummary& s, std::span<const double> values) {
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveValue, "log scale needs positive values");
    logs.push_back(std::log(v));
  }
  const ContinuousSummary ls = detail::moments(logs);
  s.log_recommended = true;
  s.log_scale = LogScaleSummary{ls.mean, ls.sd, ls.min, ls.max};
}

/// Sample mean, n-1 SD, range and adjusted Fisher-Pearson skewness. Columns
/// with |skewness| > 1 and strictly positive values get a log-scale summary.
inline ContinuousSummary summarize_continuous(std::span<const double> values) {
  ContinuousSummary s = detail::moments(values);
  if (std::abs(s.skewness) > 1.0 && s.min > 0.0) attach_log_scale(s, values);
  return s;
}

inline CategoricalSummary summarize_categorical(std::span<const std::string> values,
                                                const ColumnSpec& spec) {
  if (values.empty()) throw Error(ErrorKind::TooFewValues, spec.name + ": no non-missing labels");
  const auto labels = spec.labels();
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) counts[l] = 0;
  for (const auto& v : values) {
    auto it = counts.find(v);
    if (it == counts.end()) {
      throw Error(ErrorKind::UnknownLabel, spec.name + ": label '" + v + "' not in category set");
    }
    ++it->second;
  }
  CategoricalSummary s;
  const double total = static_cast<double>(values.size());
  for (const auto& l : labels) s.proportions.emplace_back(l, static_cast<double>(counts[l]) / total);
  return s;
}

/// Symmetric Pearson matrix; undefined entries (zero variance, < 3 complete
/// pairs) are nullopt rather than 0.
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::optional<double>> values;

  std::size_t size() const { return names.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const {
    return values[i * names.size() + j];
  }
  std::optional<double> get(std::string_view a, std::string_view b) const {
    std::optional<std::size_t> ia, ib;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == a) ia = i;
      if (names[i] == b) ib = i;
    }
    if (!ia || !ib) throw Error(ErrorKind::UnknownColumn, "correlation matrix lookup");
    return at(*ia, *ib);
  }
};

inline std::optional<double> pairwise_pearson(const std::vector<std::optional<double>>& x,
                                              const std::vector<std::optional<double>>& y) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      a.push_back(*x[i]);
      b.push_back(*y[i]);
    }
  }
  if (a.size() < 3) return std::nullopt;
  return pearson(a, b);
}

inline CorrelationMatrix correlation_matrix(const Table& table, const std::vector<std::string>& columns) {
  CorrelationMatrix m;
  m.names = columns;
  const std::size_t k = columns.size();
  std::vector<std::vector<std::optional<double>>> data;
  for (const auto& name : columns) {
    const ColumnSpec& spec = table.schema().at(name);
    if (!is_numeric_kind(spec.kind)) {
      throw Error(ErrorKind::NonNumericColumn,
                  name + " is " + std::string(to_string(spec.kind)) + ", not numeric");
    }
    data.push_back(table.numeric_column(name));
  }
  m.values.assign(k * k, std::nullopt);
  for (std::size_t i = 0; i < k; ++i) {
    m.values[i * k + i] = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto r = pairwise_pearson(data[i], data[j]);
      m.values[i * k + j] = r;
      m.values[j * k + i] = r;
    }
  }
  return m;
}

/// Upper-triangle entries with |r| strictly above threshold, strongest first.
inline std::vector<CorrelationEntry> flag_notable_correlations(const CorrelationMatrix& m,
                                                               double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "correlation threshold must be in (0, 1]");
  }
  std::vector<CorrelationEntry> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto& r = m.at(i, j);
      if (r && std::abs(*r) > threshold) out.push_back({m.names[i], m.names[j], *r});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CorrelationEntry& a, const CorrelationEntry& b) {
    return std::abs(a.r) > std::abs(b.r);
  });
  return out;
}

struct ProfileOptions {
  double correlation_threshold = 0.5;
  /// Apply the |skewness| > 1 rule.
  bool auto_log = true;
  /// Columns to log-transform regardless of skewness.
  std::vector<std::string> force_log;
  /// Columns never log-transformed.
  std::vector<std::string> no_log;
  /// When set, adds a height/weight rule derived from this BMI column.
  std::optional<std::string> bmi_column;
  std::string height_column = "Height";
  std::string weight_column = "Weight";
};

inline StatisticalProfile extract_profile(const Table& table, const ProfileOptions& options = {}) {
  StatisticalProfile profile;
  profile.n = table.row_count();
  profile.correlation_threshold = options.correlation_threshold;
  if (profile.n == 0) throw Error(ErrorKind::TooFewValues, "cannot profile an empty table");

  auto listed = [](const std::vector<std::string>& v, const std::string& name) {
    return std::find(v.begin(), v.end(), name) != v.end();
  };
  for (const auto& name : options.force_log) table.schema().require(name);

  std::vector<std::string> numeric;
  std::set<std::string> used_names;
  for (const auto& spec : table.schema().columns()) used_names.insert(spec.name);

  for (const auto& spec : table.schema().columns()) {
    ColumnProfile col;
    col.spec = spec;
    switch (spec.kind) {
      case ColumnKind::continuous: {
        const auto values = table.numeric_values(spec.name);
        ContinuousSummary s = summarize_continuous(values);
        const bool forced = listed(options.force_log, spec.name);
        if ((!options.auto_log && !forced) || listed(options.no_log, spec.name)) {
          s.log_recommended = false;
          s.log_scale.reset();
        } else if (forced && !s.log_scale) {
          attach_log_scale(s, values);
        }
        col.observed = values.size();
        col.summary = s;
        break;
      }
      case ColumnKind::ordinal:
      case ColumnKind::categorical:
      case ColumnKind::binary: {
        const auto labels = table.label_values(spec.name);
        col.observed = labels.size();
        col.summary = summarize_categorical(labels, spec);
        break;
      }
      case ColumnKind::date:
        throw Error(ErrorKind::TypeMismatch,
                    spec.name + ": date columns must be transformed before profiling");
    }
    if (is_numeric_kind(spec.kind)) numeric.push_back(spec.name);
    profile.columns.push_back(std::move(col));
  }

  profile.flagged_correlations =
      flag_notable_correlations(correlation_matrix(table, numeric), options.correlation_threshold);

  auto claim = [&](const std::string& name) {
    if (!used_names.insert(name).second) {
      throw Error(ErrorKind::ColumnCollision, "derived column '" + name + "' already exists");
    }
  };
  for (const auto& col : profile.columns) {
    if (const auto* s = col.continuous(); s && s->log_recommended) {
      const std::string ln = log_column_name(col.spec.name);
      claim(ln);
      profile.derived_rules.push_back(ExpInverse{ln, col.spec.name});
    }
  }
  if (options.bmi_column) {
    const ColumnSpec& bmi = table.schema().at(*options.bmi_column);
    if (bmi.kind != ColumnKind::continuous) {
      throw Error(ErrorKind::TypeMismatch, *options.bmi_column + " must be continuous");
    }
    claim(options.height_column);
    claim(options.weight_column);
    profile.derived_rules.push_back(
        BmiToHeightWeight{*options.bmi_column, options.height_column, options.weight_column});
  }
  return profile;
}

// ---- JSON ------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const DerivedFeatureRule& rule) {
  if (const auto* b = std::get_if<BmiToHeightWeight>(&rule)) {
    j = {{"rule", "bmi_to_height_weight"},
         {"bmi_col", b->bmi_col},
         {"height_out", b->height_out},
         {"height_unit", "cm"},
         {"weight_out", b->weight_out},
         {"weight_unit", "kg"}};
  } else {
    const auto& e = std::get<ExpInverse>(rule);
    j = {{"rule", "exp_inverse"}, {"log_col", e.log_col}, {"raw_out", e.raw_out}};
  }
}

inline DerivedFeatureRule derived_rule_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("rule").get<std::string>();
  if (kind == "bmi_to_height_weight") {
    return BmiToHeightWeight{j.at("bmi_col").get<std::string>(), j.at("height_out").get<std::string>(),
                             j.at("weight_out").get<std::string>()};
  }
  if (kind == "exp_inverse") {
    return ExpInverse{j.at("log_col").get<std::string>(), j.at("raw_out").get<std::string>()};
  }
  throw Error(ErrorKind::ParseError, "unknown derived rule '" + kind + "'");
}

inline nlohmann::json profile_to_json(const StatisticalProfile& p) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : p.columns) {
    nlohmann::json jc = c.spec;
    jc["observed"] = c.observed;
    if (const auto* s = c.continuous()) {
      nlohmann::json js = {{"type", "continuous"},
                           {"mean", s->mean},
                           {"sd", s->sd},
                           {"min", s->min},
                           {"max", s->max},
                           {"skewness", s->skewness},
                           {"log_recommended", s->log_recommended},
                           {"decimals", s->decimals}};
      if (c.spec.unit) js["unit"] = *c.spec.unit;
      if (s->log_scale) {
        js["log_scale"] = {{"mean", s->log_scale->mean},
                           {"sd", s->log_scale->sd},
                           {"min", s->log_scale->min},
                           {"max", s->log_scale->max}};
        if (c.spec.unit) js["log_scale"]["unit"] = "ln(" + *c.spec.unit + ")";
      }
      jc["summary"] = js;
    } else {
      nlohmann::json props = nlohmann::json::array();
      for (const auto& [label, prop] : c.categorical()->proportions) {
        props.push_back({{"label", label}, {"proportion", prop}});
      }
      jc["summary"] = {{"type", "categorical"}, {"proportions", props}};
    }
    cols.push_back(jc);
  }
  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& f : p.flagged_correlations) {
    flagged.push_back({{"col_a", f.col_a}, {"col_b", f.col_b}, {"r", f.r}});
  }
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : p.derived_rules) rules.push_back(r);
  return {{"n", p.n},
          {"correlation_threshold", p.correlation_threshold},
          {"columns", cols},
          {"flagged_correlations", flagged},
          {"derived_rules", rules}};
}

inline StatisticalProfile profile_from_json(const nlohmann::json& j) {
  try {
    StatisticalProfile p;
    p.n = j.at("n").get<std::size_t>();
    p.correlation_threshold = j.value("correlation_threshold", 0.5);
    for (const auto& jc : j.at("columns")) {
      ColumnProfile c;
      c.spec = jc.get<ColumnSpec>();
      c.spec.validate();
      c.observed = jc.value("observed", p.n);
      const auto& js = jc.at("summary");
      if (js.at("type").get<std::string>() == "continuous") {
        ContinuousSummary s;
        s.mean = js.at("mean").get<double>();
        s.sd = js.at("sd").get<double>();
        s.min = js.at("min").get<double>();
        s.max = js.at("max").get<double>();
        s.skewness = js.value("skewness", 0.0);
        s.log_recommended = js.value("log_recommended", false);
        s.decimals = js.value("decimals", -1);
        if (js.contains("log_scale")) {
          const auto& l = js["log_scale"];
          s.log_scale = LogScaleSummary{l.at("mean").get<double>(), l.at("sd").get<double>(),
                                        l.at("min").get<double>(), l.at("max").get<double>()};
        }
        if (s.log_recommended != s.log_scale.has_value()) {
          throw Error(ErrorKind::ParseError, c.spec.name + ": log_recommended without log_scale");
        }
        c.summary = s;
      } else {
        CategoricalSummary s;
        for (const auto& e : js.at("proportions")) {
          s.proportions.emplace_back(e.at("label").get<std::string>(), e.at("proportion").get<double>());
        }
        c.summary = s;
      }
      p.columns.push_back(std::move(c));
    }
    for (const auto& f : j.value("flagged_correlations", nlohmann::json::array())) {
      p.flagged_correlations.push_back(
          {f.at("col_a").get<std::string>(), f.at("col_b").get<std::string>(), f.at("r").get<double>()});
    }
    for (const auto& r : j.value("derived_rules", nlohmann::json::array())) {
      p.derived_rules.push_back(derived_rule_from_json(r));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("profile: ") + e.what());
  }
}

inline StatisticalProfile load_profile(const std::string& path) {
  return profile_from_json(read_json_file(path));
}

}  // namespace tabsynth

#endif  // TABSYNTH_PROFILE_HPP
