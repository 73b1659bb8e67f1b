#ifndef TABSYNTH_METRICS_HPP
#define TABSYNTH_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/csv.hpp"
#include "tabsynth/error.hpp"
#include "tabsynth/numeric.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

enum class Metric { StatisticSimilarity, KSComplement, TVComplement, CorrelationSimilarity, NewRowSynthesis };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::StatisticSimilarity: return "StatisticSimilarity";
    case Metric::KSComplement: return "KSComplement";
    case Metric::TVComplement: return "TVComplement";
    case Metric::CorrelationSimilarity: return "CorrelationSimilarity";
    case Metric::NewRowSynthesis: return "NewRowSynthesis";
  }
  return "?";
}

/// 1 - |mean(real) - mean(synth)| / (max(real) - min(real)), clamped to [0, 1].
/// Normalized by the real column's range, so the arguments are not interchangeable.
inline double statistic_similarity(std::span<const double> real, std::span<const double> synth) {
  if (real.empty() || synth.empty()) {
    throw Error(ErrorKind::TooFewValues, "statistic_similarity needs non-empty columns");
  }
  const auto [lo, hi] = std::minmax_element(real.begin(), real.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw Error(ErrorKind::ZeroRange, "real column has max == min");
  const double diff = std::abs(mean_of(real) - mean_of(synth));
  return std::clamp(1.0 - diff / range, 0.0, 1.0);
}

/// 1 - two-sample Kolmogorov-Smirnov statistic.
inline double ks_complement(std::span<const double> real, std::span<const double> synth) {
  if (real.empty() || synth.empty()) {
    throw Error(ErrorKind::TooFewValues, "ks_complement needs non-empty samples");
  }
  std::vector<double> a(real.begin(), real.end());
  std::vector<double> b(synth.begin(), synth.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    // Step both ECDFs past every copy of the next distinct value.
    double v;
    if (i == a.size()) {
      v = b[j];
    } else if (j == b.size()) {
      v = a[i];
    } else {
      v = std::min(a[i], b[j]);
    }
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return 1.0 - d;
}

/// 1 - total variation distance between label frequency tables.
inline double tv_complement_counts(const std::map<std::string, double>& real,
                                   const std::map<std::string, double>& synth) {
  double nr = 0.0, ns = 0.0;
  for (const auto& [k, v] : real) nr += v;
  for (const auto& [k, v] : synth) ns += v;
  if (!(nr > 0.0) || !(ns > 0.0)) throw Error(ErrorKind::TooFewValues, "tv_complement needs data");
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [k, v] : real) joint[k].first = v;
  for (const auto& [k, v] : synth) joint[k].second = v;
  double l1 = 0.0;
  for (const auto& [k, p] : joint) l1 += std::abs(p.first / nr - p.second / ns);
  return std::clamp(1.0 - 0.5 * l1, 0.0, 1.0);
}

inline double tv_complement(std::span<const std::string> real, std::span<const std::string> synth) {
  std::map<std::string, double> cr, cs;
  for (const auto& l : real) cr[l] += 1.0;
  for (const auto& l : synth) cs[l] += 1.0;
  return tv_complement_counts(cr, cs);
}

/// 1 - |r_real - r_synth| / 2.
inline double correlation_similarity(double r_real, double r_synth) {
  auto ok = [](double r) { return r >= -1.0 && r <= 1.0; };
  if (!ok(r_real) || !ok(r_synth)) throw Error(ErrorKind::OutOfRange, "correlations must lie in [-1, 1]");
  return 1.0 - std::abs(r_real - r_synth) / 2.0;
}

namespace detail {

inline void require_same_columns(const Schema& a, const Schema& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::SchemaMismatch, "column counts differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].kind != b[i].kind) {
      throw Error(ErrorKind::SchemaMismatch, "column " + std::to_string(i) + " differs: " + a[i].name +
                                                 " vs " + b[i].name);
    }
  }
}

inline std::string row_key(const Row& row) {
  std::string key;
  for (const auto& c : row) {
    key += std::to_string(c.index());
    key.push_back(':');
    key += format_cell(c);
    key.push_back('\x1f');
  }
  return key;
}

}  // namespace detail

/// Fraction of synthetic rows that match no real row. Discrete cells must be
/// equal; continuous cells match when within tolerance * (real column range).
/// Direction matters: the score is over synthetic rows.
inline double new_row_synthesis(const Table& real, const Table& synth, double numeric_tolerance = 0.0) {
  detail::require_same_columns(real.schema(), synth.schema());
  if (synth.row_count() == 0) throw Error(ErrorKind::TooFewValues, "synthetic table is empty");
  if (numeric_tolerance < 0.0) throw Error(ErrorKind::InvalidArgument, "negative tolerance");

  std::size_t fresh = 0;
  if (numeric_tolerance == 0.0) {
    std::unordered_set<std::string> seen;
    for (const auto& row : real.rows()) seen.insert(detail::row_key(row));
    for (const auto& row : synth.rows()) fresh += seen.contains(detail::row_key(row)) ? 0 : 1;
  } else {
    const Schema& s = real.schema();
    std::vector<double> slack(s.size(), 0.0);
    for (std::size_t c = 0; c < s.size(); ++c) {
      if (s[c].kind != ColumnKind::continuous) continue;
      const auto v = real.numeric_values(s[c].name);
      if (!v.empty()) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        slack[c] = numeric_tolerance * (*hi - *lo);
      }
    }
    auto same = [&](const Row& a, const Row& b) {
      for (std::size_t c = 0; c < a.size(); ++c) {
        const auto* x = std::get_if<double>(&a[c]);
        const auto* y = std::get_if<double>(&b[c]);
        if (x && y) {
          if (std::abs(*x - *y) > slack[c]) return false;
        } else if (a[c] != b[c]) {
          return false;
        }
      }
      return true;
    };
    for (const auto& srow : synth.rows()) {
      const bool matched = std::any_of(real.rows().begin(), real.rows().end(),
                                       [&](const Row& rrow) { return same(rrow, srow); });
      fresh += matched ? 0 : 1;
    }
  }
  return static_cast<double>(fresh) / static_cast<double>(synth.row_count());
}

// ---- report ------------------------------------------------------------------

struct MetricScore {
  Metric metric = Metric::StatisticSimilarity;
  std::vector<std::string> columns;
  double score = 0.0;
};

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

struct CorrelationScore {
  std::string col_a;
  std::string col_b;
  std::optional<double> r_real;
  std::optional<double> r_synth;
  /// Unset when either correlation is undefined.
  std::optional<double> score;
};

struct FidelityReport {
  std::vector<MetricScore> column_scores;
  std::vector<CorrelationScore> correlations;
  std::map<std::string, Aggregate> aggregates;
  double privacy = 0.0;
  std::size_t real_rows = 0;
  std::size_t synth_rows = 0;
};

struct EvaluateOptions {
  double numeric_tolerance = 0.0;
  /// Continuous columns scored on ln(value). KSComplement is unchanged by a
  /// monotone transform; StatisticSimilarity is not.
  std::vector<std::string> log_scale_columns;
};

/// Mean and n-1 standard deviation (0 for a single score).
inline Aggregate aggregate(std::span<const double> scores) {
  Aggregate a;
  a.count = scores.size();
  if (scores.empty()) return a;
  a.mean = mean_of(scores);
  if (scores.size() > 1) {
    double ss = 0.0;
    for (double s : scores) ss += (s - a.mean) * (s - a.mean);
    a.sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  }
  return a;
}

inline std::pair<std::string, std::string> parse_pair(const std::string& text) {
  const auto pos = text.find(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) {
    throw Error(ErrorKind::InvalidArgument, "column pair must look like A:B, got '" + text + "'");
  }
  return {text.substr(0, pos), text.substr(pos + 1)};
}

/// Scores synth against real over the columns of `schema`: continuous columns
/// get StatisticSimilarity and KSComplement, discrete columns TVComplement,
/// each flagged pair CorrelationSimilarity, and the projected tables NewRowSynthesis.
inline FidelityReport evaluate(const Table& real, const Table& synth, const Schema& schema,
                               const std::vector<std::pair<std::string, std::string>>& flagged_pairs,
                               const EvaluateOptions& options = {}) {
  FidelityReport report;
  report.real_rows = real.row_count();
  report.synth_rows = synth.row_count();

  for (const auto& spec : schema.columns()) {
    for (const Table* t : {&real, &synth}) {
      const auto idx = t->schema().index_of(spec.name);
      if (!idx) throw Error(ErrorKind::SchemaMismatch, "table lacks column " + spec.name);
      const ColumnSpec& have = t->schema()[*idx];
      if (have.kind != spec.kind) {
        throw Error(ErrorKind::SchemaMismatch, spec.name + " has kind " +
                                                   std::string(to_string(have.kind)) + ", expected " +
                                                   std::string(to_string(spec.kind)));
      }
    }
  }

  std::map<Metric, std::vector<double>> by_metric;
  auto add = [&](Metric m, std::vector<std::string> cols, double score) {
    report.column_scores.push_back({m, std::move(cols), score});
    by_metric[m].push_back(score);
  };

  for (const auto& spec : schema.columns()) {
    if (spec.kind == ColumnKind::continuous) {
      auto r = real.numeric_values(spec.name);
      auto s = synth.numeric_values(spec.name);
      if (std::find(options.log_scale_columns.begin(), options.log_scale_columns.end(), spec.name) !=
          options.log_scale_columns.end()) {
        for (auto* v : {&r, &s}) {
          for (double& x : *v) {
            if (!(x > 0.0)) throw Error(ErrorKind::NonPositiveValue, spec.name + " has values <= 0");
            x = std::log(x);
          }
        }
      }
      add(Metric::StatisticSimilarity, {spec.name}, statistic_similarity(r, s));
      add(Metric::KSComplement, {spec.name}, ks_complement(r, s));
    } else if (is_discrete_kind(spec.kind)) {
      add(Metric::TVComplement, {spec.name},
          tv_complement(real.label_values(spec.name), synth.label_values(spec.name)));
    } else {
      throw Error(ErrorKind::TypeMismatch, spec.name + ": date columns cannot be scored");
    }
  }

  for (const auto& [a, b] : flagged_pairs) {
    CorrelationScore cs{a, b, {}, {}, {}};
    cs.r_real = pairwise_pearson(real.numeric_column(a), real.numeric_column(b));
    cs.r_synth = pairwise_pearson(synth.numeric_column(a), synth.numeric_column(b));
    if (cs.r_real && cs.r_synth) {
      cs.score = correlation_similarity(*cs.r_real, *cs.r_synth);
      by_metric[Metric::CorrelationSimilarity].push_back(*cs.score);
    }
    report.correlations.push_back(std::move(cs));
  }

  report.privacy = new_row_synthesis(real.select(schema.names()), synth.select(schema.names()),
                                     options.numeric_tolerance);
  by_metric[Metric::NewRowSynthesis].push_back(report.privacy);

  for (const auto& [m, scores] : by_metric) report.aggregates[std::string(to_string(m))] = aggregate(scores);
  return report;
}

inline nlohmann::json fidelity_to_json(const FidelityReport& r) {
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : r.column_scores) {
    scores.push_back({{"metric", std::string(to_string(s.metric))}, {"columns", s.columns}, {"score", s.score}});
  }
  nlohmann::json corr = nlohmann::json::array();
  for (const auto& c : r.correlations) {
    nlohmann::json j = {{"col_a", c.col_a}, {"col_b", c.col_b}};
    j["r_real"] = c.r_real ? nlohmann::json(*c.r_real) : nlohmann::json(nullptr);
    j["r_synth"] = c.r_synth ? nlohmann::json(*c.r_synth) : nlohmann::json(nullptr);
    j["score"] = c.score ? nlohmann::json(*c.score) : nlohmann::json(nullptr);
    corr.push_back(j);
  }
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [name, a] : r.aggregates) agg[name] = {{"mean", a.mean}, {"sd", a.sd}, {"count", a.count}};
  return {{"real_rows", r.real_rows},
          {"synth_rows", r.synth_rows},
          {"column_scores", scores},
          {"correlations", corr},
          {"aggregates", agg},
          {"privacy", {{"metric", "NewRowSynthesis"}, {"score", r.privacy}}}};
}

/// One row per metric x column: metric,columns,score.
inline std::string fidelity_to_csv(const FidelityReport& r) {
  std::string out = "metric,columns,score\n";
  auto line = [&](std::string_view metric, const std::string& cols, double score) {
    out += std::string(metric) + "," + csv::quote(cols) + "," + format_double(score) + "\n";
  };
  for (const auto& s : r.column_scores) {
    std::string cols;
    for (std::size_t i = 0; i < s.columns.size(); ++i) cols += (i ? "|" : "") + s.columns[i];
    line(to_string(s.metric), cols, s.score);
  }
  for (const auto& c : r.correlations) {
    if (c.score) line(to_string(Metric::CorrelationSimilarity), c.col_a + "|" + c.col_b, *c.score);
  }
  line(to_string(Metric::NewRowSynthesis), "*", r.privacy);
  return out;
}

}  // namespace tabsynth

#endif  // TABSYNTH_METRICS_HPP
