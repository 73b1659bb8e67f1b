#ifndef TABSYNTH_TSTR_HPP
#define TABSYNTH_TSTR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/error.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

using FeatureMatrix = std::vector<std::vector<double>>;  // row-major

/// h(x) = polarity if x > threshold, else -polarity.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double alpha = 0.0;

  int vote(std::span<const double> row) const { return row[feature] > threshold ? polarity : -polarity; }
  bool operator==(const Stump&) const = default;
};

struct AdaBoostModel {
  std::vector<Stump> stumps;
  std::vector<std::string> feature_names;
  std::size_t feature_count = 0;
  int n_stages = 50;
  std::uint64_t seed = 0;
};

inline constexpr double kStumpTieTolerance = 1e-12;
inline constexpr double kErrorClamp = 1e-10;

namespace detail {

inline std::size_t check_matrix(const FeatureMatrix& x, std::size_t n_labels) {
  if (x.size() != n_labels) throw Error(ErrorKind::LengthMismatch, "feature rows and labels differ in length");
  if (x.empty() || x.front().empty()) throw Error(ErrorKind::EmptyFeatures, "no features");
  const std::size_t k = x.front().size();
  for (const auto& row : x) {
    if (row.size() != k) throw Error(ErrorKind::FeatureMismatch, "ragged feature matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite feature value");
    }
  }
  return k;
}

struct StumpFit {
  Stump stump;
  double error = 0.0;
};

/// Lowest weighted error stump over all (feature, midpoint, polarity) triples.
/// Ties within kStumpTieTolerance keep the earlier candidate in the order
/// feature, threshold, polarity (+1 first).
inline StumpFit best_stump(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w) {
  const std::size_t n = x.size();
  const std::size_t k = x.front().size();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double pos_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) pos_total += y[i] == 1 ? w[i] : 0.0;

  std::optional<StumpFit> best;
  auto consider = [&](std::size_t f, double t, int polarity, double err) {
    if (!best || err < best->error - kStumpTieTolerance) best = StumpFit{{f, t, polarity, 0.0}, err};
  };

  std::vector<std::size_t> order(n);
  for (std::size_t f = 0; f < k; ++f) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
    // below_pos / below_neg: weight of each class with x <= current threshold.
    double below_pos = 0.0, below_neg = 0.0;
    for (std::size_t i = 0; i < n;) {
      const double v = x[order[i]][f];
      while (i < n && x[order[i]][f] == v) {
        (y[order[i]] == 1 ? below_pos : below_neg) += w[order[i]];
        ++i;
      }
      if (i == n) break;
      const double t = v + (x[order[i]][f] - v) / 2.0;
      // Polarity +1 predicts positive above t: errors are positives below and negatives above.
      const double err_plus = below_pos + ((total - pos_total) - below_neg);
      consider(f, t, 1, err_plus);
      consider(f, t, -1, total - err_plus);
    }
  }
  if (!best) {
    // Every feature is constant: a stump that votes negative everywhere.
    const double t = x.front().front();
    const double err_plus = pos_total;
    best = err_plus <= (total - err_plus) + kStumpTieTolerance ? StumpFit{{0, t, 1, 0.0}, err_plus}
                                                                : StumpFit{{0, t, -1, 0.0}, total - err_plus};
  }
  best->error /= total;
  return *best;
}

}  // namespace detail

/// Discrete two-class AdaBoost over decision stumps. Labels are 0/1.
/// Stops after n_stages, on a perfect stump, or when a stage cannot beat
/// chance (a first-stage stump is then kept with zero weight).
inline AdaBoostModel train_adaboost(const FeatureMatrix& x, std::span<const int> labels, int n_stages,
                                    std::uint64_t seed = 0, std::vector<std::string> feature_names = {}) {
  if (n_stages < 1) throw Error(ErrorKind::InvalidArgument, "n_stages must be positive");
  const std::size_t k = detail::check_matrix(x, labels.size());
  if (!feature_names.empty() && feature_names.size() != k) {
    throw Error(ErrorKind::FeatureMismatch, "feature name count differs from feature count");
  }
  std::size_t positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(ErrorKind::InvalidArgument, "labels must be 0 or 1");
    positives += static_cast<std::size_t>(l);
  }
  if (x.size() < 2 || positives == 0 || positives == labels.size()) {
    throw Error(ErrorKind::SingleClassLabels, "training labels need both classes");
  }

  AdaBoostModel model;
  model.feature_names = std::move(feature_names);
  model.feature_count = k;
  model.n_stages = n_stages;
  model.seed = seed;

  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (int stage = 0; stage < n_stages; ++stage) {
    auto fit = detail::best_stump(x, labels, w);
    if (fit.error >= 0.5) {
      if (stage == 0) model.stumps.push_back(fit.stump);
      break;
    }
    const double err = std::clamp(fit.error, kErrorClamp, 1.0 - kErrorClamp);
    fit.stump.alpha = 0.5 * std::log((1.0 - err) / err);
    model.stumps.push_back(fit.stump);
    if (fit.error <= 0.0) break;

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int yi = labels[i] == 1 ? 1 : -1;
      w[i] *= std::exp(-fit.stump.alpha * yi * fit.stump.vote(x[i]));
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
  }
  return model;
}

/// (s / A + 1) / 2 with s = sum alpha * h(x) and A = sum alpha; 0.5 when A = 0.
inline std::vector<double> predict_proba(const AdaBoostModel& model, const FeatureMatrix& x) {
  double total = 0.0;
  for (const auto& s : model.stumps) total += s.alpha;
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    if (row.size() != model.feature_count) {
      throw Error(ErrorKind::FeatureMismatch, "row has " + std::to_string(row.size()) + " features, model expects " +
                                                  std::to_string(model.feature_count));
    }
    if (total <= 0.0) {
      out.push_back(0.5);
      continue;
    }
    double s = 0.0;
    for (const auto& st : model.stumps) s += st.alpha * st.vote(row);
    out.push_back(std::clamp((s / total + 1.0) / 2.0, 0.0, 1.0));
  }
  return out;
}

// ---- threshold sweep ---------------------------------------------------------

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct SweepRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // thresholds 0.00, 0.01, ..., 1.00
  std::size_t best_index = 0;
  const SweepRow& best() const { return rows.at(best_index); }
};

inline constexpr int kSweepSteps = 100;

inline double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

inline SweepRow score_threshold(std::span<const double> probs, std::span<const int> truth, double threshold) {
  SweepRow row;
  row.threshold = threshold;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] > threshold;
    const bool actual = truth[i] == 1;
    if (predicted && actual) ++row.confusion.tp;
    else if (predicted) ++row.confusion.fp;
    else if (actual) ++row.confusion.fn;
    else ++row.confusion.tn;
  }
  const auto& c = row.confusion;
  row.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  row.recall = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  row.f1 = f1_score(row.precision, row.recall);
  return row;
}

/// Predicts 1 iff p > tau on the grid tau = k/100; best F1 wins, lowest tau on ties.
inline SweepResult sweep_thresholds(std::span<const double> probs, std::span<const int> truth) {
  if (probs.size() != truth.size()) throw Error(ErrorKind::LengthMismatch, "probabilities and labels differ in length");
  if (std::none_of(truth.begin(), truth.end(), [](int t) { return t == 1; })) {
    throw Error(ErrorKind::NoPositives, "truth has no positive labels");
  }
  SweepResult out;
  for (int k = 0; k <= kSweepSteps; ++k) {
    out.rows.push_back(score_threshold(probs, truth, static_cast<double>(k) / kSweepSteps));
    if (out.rows.back().f1 > out.rows[out.best_index].f1) out.best_index = out.rows.size() - 1;
  }
  return out;
}

// ---- train synthetic, test real ----------------------------------------------

struct TstrConfig {
  std::string target = "KPS_deterioration";
  int n_stages = 50;
  std::uint64_t seed = 0;
  bool include_log_columns = false;
  std::vector<std::string> exclude_columns;
};

struct TstrReport {
  std::string target;
  std::string positive_label;
  std::vector<std::string> features;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  AdaBoostModel model;
  SweepResult sweep;
};

struct LabelledData {
  FeatureMatrix x;
  std::vector<int> y;
};

/// Feature columns used for TSTR: every numeric column of `schema` except the
/// target, ln_ columns (unless asked for) and explicit exclusions.
inline std::vector<std::string> tstr_features(const Schema& schema, const TstrConfig& config) {
  std::vector<std::string> out;
  for (const auto& spec : schema.columns()) {
    if (spec.name == config.target || !is_numeric_kind(spec.kind)) continue;
    if (!config.include_log_columns && spec.name.starts_with(kLogPrefix)) continue;
    if (std::find(config.exclude_columns.begin(), config.exclude_columns.end(), spec.name) !=
        config.exclude_columns.end()) {
      continue;
    }
    out.push_back(spec.name);
  }
  if (out.empty()) throw Error(ErrorKind::EmptyFeatures, "no numeric feature columns");
  return out;
}

inline LabelledData labelled_data(const Table& t, const std::vector<std::string>& features, const std::string& target) {
  const ColumnSpec& ts = t.schema().at(target);
  if (ts.kind != ColumnKind::binary) throw Error(ErrorKind::TypeMismatch, target + " is not binary");
  LabelledData d;
  std::vector<std::vector<std::optional<double>>> cols;
  for (const auto& f : features) cols.push_back(t.numeric_column(f));
  const auto y = t.numeric_column(target);
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (!y[r]) throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(r) + " has no " + target);
    std::vector<double> row;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (!cols[c][r]) {
        throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(r) + " is missing " + features[c]);
      }
      row.push_back(*cols[c][r]);
    }
    d.x.push_back(std::move(row));
    d.y.push_back(static_cast<int>(*y[r]));
  }
  return d;
}

/// Trains on every synthetic row, scores every real row, and sweeps thresholds.
/// The positive class is the target's second category.
inline TstrReport run_tstr(const Table& synth, const Table& real, const TstrConfig& config) {
  TstrReport rep;
  rep.target = config.target;
  rep.features = tstr_features(real.schema(), config);
  for (const auto& name : rep.features) {
    const auto idx = synth.schema().index_of(name);
    if (!idx || synth.schema()[*idx].kind != real.schema().at(name).kind) {
      throw Error(ErrorKind::SchemaMismatch, "synthetic table lacks a matching " + name + " column");
    }
  }
  const ColumnSpec& rt = real.schema().at(config.target);
  const auto st = synth.schema().index_of(config.target);
  if (!st || synth.schema()[*st].categories != rt.categories) {
    throw Error(ErrorKind::SchemaMismatch, "target " + config.target + " differs between tables");
  }
  rep.positive_label = rt.kind == ColumnKind::binary ? rt.categories.at(1) : "1";

  const auto train = labelled_data(synth, rep.features, config.target);
  const auto test = labelled_data(real, rep.features, config.target);
  rep.train_rows = train.x.size();
  rep.test_rows = test.x.size();
  rep.model = train_adaboost(train.x, train.y, config.n_stages, config.seed, rep.features);
  rep.sweep = sweep_thresholds(predict_proba(rep.model, test.x), test.y);
  return rep;
}

inline nlohmann::json confusion_to_json(const ConfusionMatrix& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

inline nlohmann::json tstr_to_json(const TstrReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& row : r.sweep.rows) {
    sweep.push_back({{"threshold", row.threshold},
                     {"precision", row.precision},
                     {"recall", row.recall},
                     {"f1", row.f1},
                     {"confusion", confusion_to_json(row.confusion)}});
  }
  nlohmann::json stumps = nlohmann::json::array();
  for (const auto& s : r.model.stumps) {
    stumps.push_back({{"feature", r.features.at(s.feature)},
                      {"threshold", s.threshold},
                      {"polarity", s.polarity},
                      {"alpha", s.alpha}});
  }
  const auto& best = r.sweep.best();
  return {{"target", r.target},
          {"positive_label", r.positive_label},
          {"features", r.features},
          {"train_rows", r.train_rows},
          {"test_rows", r.test_rows},
          {"n_stages", r.model.n_stages},
          {"stumps", stumps},
          {"best",
           {{"threshold", best.threshold},
            {"precision", best.precision},
            {"recall", best.recall},
            {"f1", best.f1},
            {"confusion", confusion_to_json(best.confusion)}}},
          {"sweep", sweep}};
}

}  // namespace tabsynth

#endif  // TABSYNTH_TSTR_HPP
