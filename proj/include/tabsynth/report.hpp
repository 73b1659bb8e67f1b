#ifndef TABSYNTH_REPORT_HPP
#define TABSYNTH_REPORT_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/error.hpp"
#include "tabsynth/metrics.hpp"
#include "tabsynth/numeric.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once, so callers that write results by index get the same
/// output for any thread count. The first exception is rethrown.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---- confidence intervals ------------------------------------------------------

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Normal-approximation 95% interval for the mean: mean +- z * sd / sqrt(n).
inline Interval ci95(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::TooFewValues, "a confidence interval needs two values");
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double se = std::sqrt(ss / static_cast<double>(values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
  return {m - kZ95 * se, m + kZ95 * se};
}

/// Share of the real interval covered by the synthetic one, in [0, 1].
inline double ci_overlap(const Interval& real, const Interval& synth) {
  if (!(real.width() > 0.0)) throw Error(ErrorKind::ZeroRange, "real confidence interval has zero width");
  const double inter = std::min(real.hi, synth.hi) - std::max(real.lo, synth.lo);
  return std::clamp(inter / real.width(), 0.0, 1.0);
}

// ---- trial ranking ---------------------------------------------------------------

struct TrialRanking {
  std::string column;
  std::string metric;  // "CIOverlap" or "TVComplement"
  std::vector<double> scores;
  std::size_t best = 0;
  std::size_t worst = 0;
};

/// Ranks repeated generations column by column: continuous columns by 95% CI
/// overlap with the real data, discrete columns by TVComplement. Ties go to
/// the earlier trial.
inline std::vector<TrialRanking> rank_trials(const Table& real, const std::vector<Table>& trials, const Schema& schema) {
  if (trials.empty()) throw Error(ErrorKind::InvalidArgument, "no trials to rank");
  std::vector<TrialRanking> out;
  for (const auto& spec : schema.columns()) {
    TrialRanking rank{spec.name, "", {}, 0, 0};
    if (spec.kind == ColumnKind::continuous) {
      rank.metric = "CIOverlap";
      const Interval r = ci95(real.numeric_values(spec.name));
      for (const auto& t : trials) rank.scores.push_back(ci_overlap(r, ci95(t.numeric_values(spec.name))));
    } else if (is_discrete_kind(spec.kind)) {
      rank.metric = "TVComplement";
      const auto r = real.label_values(spec.name);
      for (const auto& t : trials) rank.scores.push_back(tv_complement(r, t.label_values(spec.name)));
    } else {
      continue;
    }
    for (std::size_t i = 1; i < rank.scores.size(); ++i) {
      if (rank.scores[i] > rank.scores[rank.best]) rank.best = i;
      if (rank.scores[i] < rank.scores[rank.worst]) rank.worst = i;
    }
    out.push_back(std::move(rank));
  }
  return out;
}

inline nlohmann::json rankings_to_json(const std::vector<TrialRanking>& ranks, const std::vector<std::string>& trial_names) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : ranks) {
    a.push_back({{"column", r.column},
                 {"metric", r.metric},
                 {"scores", r.scores},
                 {"best", trial_names.at(r.best)},
                 {"worst", trial_names.at(r.worst)}});
  }
  return a;
}

// ---- comparison document -------------------------------------------------------------

inline constexpr std::array<std::string_view, 5> kReportMetrics = {
    "StatisticSimilarity", "KSComplement", "TVComplement", "CorrelationSimilarity", "NewRowSynthesis"};

struct DatasetSummary {
  std::string label;
  std::map<std::string, Aggregate> metrics;
  std::optional<double> tstr_f1;
  std::optional<double> tstr_threshold;
};

/// Aggregates recomputed from a fidelity report's per-column scores, so the
/// comparison never trusts stored totals.
inline std::map<std::string, Aggregate> aggregates_from_fidelity_json(const nlohmann::json& j) {
  std::map<std::string, std::vector<double>> scores;
  for (const auto& s : j.at("column_scores")) scores[s.at("metric").get<std::string>()].push_back(s.at("score").get<double>());
  for (const auto& c : j.at("correlations")) {
    if (!c.at("score").is_null()) scores["CorrelationSimilarity"].push_back(c.at("score").get<double>());
  }
  scores["NewRowSynthesis"].push_back(j.at("privacy").at("score").get<double>());
  std::map<std::string, Aggregate> out;
  for (const auto& [m, v] : scores) out[m] = aggregate(v);
  return out;
}

inline nlohmann::json comparison_to_json(const std::vector<DatasetSummary>& rows) {
  nlohmann::json datasets = nlohmann::json::array();
  for (const auto& d : rows) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [m, a] : d.metrics) metrics[m] = {{"mean", a.mean}, {"sd", a.sd}, {"count", a.count}};
    nlohmann::json j = {{"label", d.label}, {"metrics", metrics}};
    j["tstr_f1"] = d.tstr_f1 ? nlohmann::json(*d.tstr_f1) : nlohmann::json(nullptr);
    j["tstr_threshold"] = d.tstr_threshold ? nlohmann::json(*d.tstr_threshold) : nlohmann::json(nullptr);
    datasets.push_back(j);
  }
  return {{"datasets", datasets}};
}

/// Markdown table: one row per metric, one column per dataset.
inline std::string comparison_to_markdown(const std::vector<DatasetSummary>& rows) {
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return std::string(buf);
  };
  std::string out = "| Metric |";
  for (const auto& d : rows) out += " " + d.label + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < rows.size(); ++i) out += "---|";
  out += "\n";
  for (auto metric : kReportMetrics) {
    out += "| " + std::string(metric) + " |";
    for (const auto& d : rows) {
      auto it = d.metrics.find(std::string(metric));
      if (it == d.metrics.end() || it->second.count == 0) {
        out += " - |";
      } else if (it->second.count == 1) {
        out += " " + num(it->second.mean) + " |";
      } else {
        out += " " + num(it->second.mean) + " ± " + num(it->second.sd) + " |";
      }
    }
    out += "\n";
  }
  out += "| TSTR (F1) |";
  for (const auto& d : rows) out += d.tstr_f1 ? " " + num(*d.tstr_f1) + " |" : std::string(" - |");
  out += "\n";
  return out;
}

}  // namespace tabsynth

#endif  // TABSYNTH_REPORT_HPP
