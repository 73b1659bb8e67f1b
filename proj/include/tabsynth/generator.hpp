#ifndef TABSYNTH_GENERATOR_HPP
#define TABSYNTH_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabsynth/error.hpp"
#include "tabsynth/numeric.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/rng.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"

namespace tabsynth {

struct GenerationConfig {
  std::size_t n = 139;
  std::uint64_t seed = 0;
  double correlation_tolerance = 0.05;
  int max_calibration_iters = 50;
  /// Per-column decimal places; columns not listed use the decimals observed
  /// when the profile was extracted. Negative means no rounding.
  std::map<std::string, int> rounding;
  /// Lower bound on the calibration pilot sample size.
  std::size_t pilot_size = 5000;

  void validate() const {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "generation needs n >= 2");
    if (!(correlation_tolerance > 0.0 && correlation_tolerance < 0.5)) {
      throw Error(ErrorKind::InvalidArgument, "correlation_tolerance must be in (0, 0.5)");
    }
    if (max_calibration_iters < 1) {
      throw Error(ErrorKind::InvalidArgument, "max_calibration_iters must be positive");
    }
  }
};

/// Height model for the BMI rule: normal(170, 8) cm truncated to [145, 200].
inline constexpr TruncatedNormal kHeightModel{170.0, 8.0, 145.0, 200.0};

// ---- categorical quotas ------------------------------------------------------

/// Largest-remainder (Hamilton) apportionment of n across the summary's labels.
/// Remainder ties go to the earlier label.
inline std::vector<std::pair<std::string, std::size_t>> allocate_categories(
    const CategoricalSummary& summary, std::size_t n) {
  if (summary.proportions.empty()) throw Error(ErrorKind::InvalidArgument, "no categories");
  double total = 0.0;
  for (const auto& [label, p] : summary.proportions) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative proportion for " + label);
    total += p;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "proportions sum to zero");

  const std::size_t k = summary.proportions.size();
  std::vector<std::pair<std::string, std::size_t>> out;
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = static_cast<double>(n) * summary.proportions[i].second / total;
    // Absorb representation error so 0.5 * 140 floors to 70, not 69.
    const double whole = std::floor(quota + 1e-9);
    remainder[i] = std::max(0.0, quota - whole);
    out.emplace_back(summary.proportions[i].first, static_cast<std::size_t>(whole));
    assigned += static_cast<std::size_t>(whole);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b] + 1e-12;
  });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % k) {
    ++out[order[i]].second;
    ++assigned;
  }
  // Floors can only overshoot through the epsilon above; take back from the end.
  for (std::size_t i = k; assigned > n && i-- > 0;) {
    const std::size_t j = order[i];
    if (out[j].second > 0) {
      --out[j].second;
      --assigned;
    }
  }
  return out;
}

// ---- marginals -----------------------------------------------------------------

/// One column's marginal, ready to map a uniform (or latent normal) draw to a cell value.
struct Margin {
  ColumnKind kind = ColumnKind::continuous;
  std::string name;

  // continuous
  TruncatedNormal dist;
  bool log_scale = false;
  bool moment_matched = false;
  std::optional<double> constant;
  int decimals = -1;
  double lower = 0.0;
  double upper = 0.0;

  // discrete
  std::vector<std::string> labels;
  std::vector<double> levels;
  CategoricalSummary proportions;

  bool discrete() const { return kind != ColumnKind::continuous; }

  /// Continuous cell value for u in (0, 1), rounded and inside [lower, upper].
  double value(double u) const {
    if (constant) return *constant;
    double x = dist.quantile(u);
    if (log_scale) x = std::exp(x);
    return std::clamp(round_to(x, decimals), lower, upper);
  }

  /// Discrete codes for a latent sample: exact quota counts assigned by rank
  /// of z, lowest z to the lowest level.
  std::vector<double> assign_by_rank(std::span<const double> z) const {
    const auto counts = allocate_categories(proportions, z.size());
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    std::vector<double> out(z.size());
    std::size_t pos = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (std::size_t k = 0; k < counts[c].second; ++k) out[order[pos++]] = levels[c];
    }
    return out;
  }

  /// Maps latent standard normals to column values (codes for discrete margins).
  std::vector<double> realize(std::span<const double> z) const {
    if (discrete()) return assign_by_rank(z);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double u = z[i] > 0.0 ? 1.0 - normal_sf(z[i]) : normal_cdf(z[i]);
      out[i] = value(std::clamp(u, 0x1.0p-60, 1.0 - 0x1.0p-53));
    }
    return out;
  }
};

namespace detail {

inline double ceil_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::ceil(x * scale - 1e-9) / scale;
}

inline double floor_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(x * scale + 1e-9) / scale;
}

}  // namespace detail

/// Builds the sampling marginal for a continuous summary. The parent normal is
/// fitted so that the truncated distribution reproduces the target mean and SD
/// (on the log scale for log-recommended columns); when no truncated normal
/// can, the plain (mean, sd) parent is truncated instead.
inline Margin continuous_margin(const std::string& name, const ContinuousSummary& s, int decimals) {
  Margin m;
  m.kind = ColumnKind::continuous;
  m.name = name;
  if (!(s.sd >= 0.0)) throw Error(ErrorKind::InvalidArgument, name + ": negative sd");
  if (s.min == s.max && s.sd > 0.0) {
    throw Error(ErrorKind::DegenerateBounds, name + ": min == max with sd > 0");
  }
  m.decimals = decimals;
  m.lower = s.min;
  m.upper = s.max;
  if (decimals >= 0) {
    const double lo = detail::ceil_to(s.min, decimals);
    const double hi = detail::floor_to(s.max, decimals);
    if (lo <= hi) {
      m.lower = lo;
      m.upper = hi;
    } else {
      m.decimals = -1;
    }
  }
  if (s.sd == 0.0) {
    m.constant = std::clamp(s.mean, s.min, s.max);
    return m;
  }
  double mean = s.mean, sd = s.sd, lo = m.lower, hi = m.upper;
  if (s.log_recommended && s.log_scale) {
    if (!(m.lower > 0.0)) throw Error(ErrorKind::NonPositiveValue, name + ": log scale needs min > 0");
    m.log_scale = true;
    mean = s.log_scale->mean;
    sd = s.log_scale->sd;
    lo = std::log(m.lower);
    hi = std::log(m.upper);
    if (sd == 0.0) {
      m.constant = std::clamp(s.mean, s.min, s.max);
      return m;
    }
  }
  if (lo == hi) {
    m.constant = m.log_scale ? m.lower : lo;
    return m;
  }
  if (auto fit = fit_truncated_normal(mean, sd, lo, hi)) {
    m.dist = *fit;
    m.moment_matched = true;
  } else {
    m.dist = TruncatedNormal{mean, sd, lo, hi};
  }
  return m;
}

inline Margin discrete_margin(const ColumnSpec& spec, const CategoricalSummary& s) {
  Margin m;
  m.kind = spec.kind;
  m.name = spec.name;
  m.proportions = s;
  for (std::size_t i = 0; i < s.proportions.size(); ++i) {
    const auto& label = s.proportions[i].first;
    m.labels.push_back(label);
    m.levels.push_back(spec.kind == ColumnKind::ordinal ? std::stod(label) : static_cast<double>(i));
  }
  return m;
}

inline int resolve_decimals(const GenerationConfig& config, const std::string& name,
                            const ContinuousSummary& s) {
  if (auto it = config.rounding.find(name); it != config.rounding.end()) return it->second;
  return s.decimals;
}

inline Margin margin_for(const ColumnProfile& col, int decimals) {
  if (const auto* s = col.continuous()) return continuous_margin(col.spec.name, *s, decimals);
  return discrete_margin(col.spec, *col.categorical());
}

struct ContinuousDraw {
  std::vector<double> raw;
  /// ln(raw) for log-recommended columns, empty otherwise.
  std::vector<double> log;
};

inline ContinuousDraw draw_from_margin(const Margin& m, std::size_t n, Rng& rng) {
  ContinuousDraw d;
  d.raw.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.raw.push_back(m.value(rng.uniform()));
  if (m.log_scale) {
    for (double v : d.raw) d.log.push_back(std::log(v));
  }
  return d;
}

/// Truncated-normal draws on the raw or log scale. Raw values are rounded to
/// `decimals` first and the ln column is computed from the rounded value, so
/// exp(ln) reproduces the raw cell.
inline ContinuousDraw sample_continuous(const ContinuousSummary& summary, std::size_t n, Rng& rng,
                                        int decimals = -1) {
  return draw_from_margin(continuous_margin("column", summary, decimals), n, rng);
}

// ---- correlation induction -------------------------------------------------

struct InducedPair {
  std::vector<double> a;
  std::vector<double> b;
  double r_target = 0.0;
  double pilot_rho = 0.0;
  double pilot_r = 0.0;
  double rho = 0.0;
  double realized_r = 0.0;
  double frechet_min = -1.0;
  double frechet_max = 1.0;
  int iterations = 0;
};

namespace detail {

inline double realized_r(const Margin& ma, const Margin& mb, std::span<const double> z1,
                         std::span<const double> e, double rho) {
  std::vector<double> z2(z1.size());
  const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (std::size_t i = 0; i < z1.size(); ++i) z2[i] = rho * z1[i] + c * e[i];
  const auto a = ma.realize(z1);
  const auto b = mb.realize(z2);
  return pearson(a, b).value_or(0.0);
}

struct Calibration {
  double rho = 0.0;
  double r = 0.0;
  int iterations = 0;
};

/// Bisection on the latent correlation with common random numbers. Runs to a
/// narrow bracket (or the iteration cap) and keeps the closest realized r.
inline Calibration calibrate(const Margin& ma, const Margin& mb, std::span<const double> z1,
                             std::span<const double> e, double target, int max_iters) {
  double lo = -1.0, hi = 1.0;
  Calibration best{0.0, realized_r(ma, mb, z1, e, 0.0), 0};
  for (int it = 1; it <= max_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = realized_r(ma, mb, z1, e, mid);
    if (std::abs(r - target) < std::abs(best.r - target)) best = {mid, r, it};
    best.iterations = it;
    if (r < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-9 || r == target) break;
  }
  return best;
}

inline std::vector<double> normals(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  for (auto& x : z) x = normal_quantile(rng.uniform());
  return z;
}

}  // namespace detail

/// Pearson bounds reachable by any coupling of the two marginals
/// (comonotone and antitone arrangements on an m-point quantile grid).
inline std::pair<double, double> frechet_bounds(const Margin& ma, const Margin& mb, std::size_t m) {
  std::vector<double> z(m), neg(m);
  for (std::size_t i = 0; i < m; ++i) {
    z[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));
    neg[i] = -z[i];
  }
  const auto a = ma.realize(z);
  const auto hi = pearson(a, mb.realize(z)).value_or(0.0);
  const auto lo = pearson(a, mb.realize(neg)).value_or(0.0);
  return {lo, hi};
}

/// Gaussian-copula pair sampler. A pilot of max(n, pilot_size) latent pairs
/// calibrates the latent correlation; the final n-row draw is then refined
/// with the same bisection so the realized r of the emitted rows is on target.
/// Discrete margins receive exact quota counts.
inline InducedPair induce_correlation(const Margin& ma, const Margin& mb, double r_target,
                                      std::size_t n, const Rng& rng, double tolerance = 0.05,
                                      int max_iters = 50, std::size_t pilot_size = 5000) {
  if (ma.kind == ColumnKind::categorical || mb.kind == ColumnKind::categorical) {
    throw Error(ErrorKind::NonNumericColumn, "correlation induction needs ordered margins");
  }
  if (!(std::abs(r_target) < 1.0)) throw Error(ErrorKind::OutOfRange, "|r_target| must be < 1");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "induce_correlation needs n >= 2");

  InducedPair out;
  out.r_target = r_target;
  const std::size_t m = std::max(n, pilot_size);
  std::tie(out.frechet_min, out.frechet_max) = frechet_bounds(ma, mb, m);
  if (r_target > out.frechet_max || r_target < out.frechet_min) {
    throw Error(ErrorKind::InfeasibleTarget,
                ma.name + "~" + mb.name + ": r = " + format_double(r_target) +
                    " outside attainable range [" + format_double(out.frechet_min) + ", " +
                    format_double(out.frechet_max) + "]");
  }

  Rng final_rng = rng.substream(2);
  const auto z1 = detail::normals(final_rng, n);
  const auto e = detail::normals(final_rng, n);

  {
    Rng pilot_rng = rng.substream(1);
    const auto pz = detail::normals(pilot_rng, m);
    const auto pe = detail::normals(pilot_rng, m);
    const auto pilot = detail::calibrate(ma, mb, pz, pe, r_target, max_iters);
    out.pilot_rho = pilot.rho;
    out.pilot_r = pilot.r;
    auto fail = [&](const char* stage, double rho, double r) {
      return Error(ErrorKind::CalibrationFailed,
                   ma.name + "~" + mb.name + " " + stage + ": target r = " + format_double(r_target) +
                       ", best latent rho = " + format_double(rho) + ", achieved r = " +
                       format_double(r) + ", tolerance = " + format_double(tolerance));
    };
    if (std::abs(pilot.r - r_target) > tolerance) throw fail("pilot", pilot.rho, pilot.r);

    const auto fin = detail::calibrate(ma, mb, z1, e, r_target, max_iters);
    if (std::abs(fin.r - r_target) > tolerance) throw fail("final sample", fin.rho, fin.r);
    out.rho = fin.rho;
    out.iterations = pilot.iterations + fin.iterations;
  }

  std::vector<double> z2(n);
  const double c = std::sqrt(std::max(0.0, 1.0 - out.rho * out.rho));
  for (std::size_t i = 0; i < n; ++i) z2[i] = out.rho * z1[i] + c * e[i];
  out.a = ma.realize(z1);
  out.b = mb.realize(z2);
  out.realized_r = pearson(out.a, out.b).value_or(0.0);
  return out;
}

// ---- height and weight -----------------------------------------------------------

/// Weight from BMI and a given height: BMI * (height/100)^2, rounded to 0.01 kg.
inline std::vector<double> weights_for(std::span<const double> bmi, std::span<const double> height_cm) {
  if (bmi.size() != height_cm.size()) throw Error(ErrorKind::LengthMismatch, "bmi/height length");
  std::vector<double> w(bmi.size());
  for (std::size_t i = 0; i < bmi.size(); ++i) {
    if (!(bmi[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveBmi, "BMI at row " + std::to_string(i) + " is not positive");
    }
    const double h = height_cm[i] / 100.0;
    w[i] = round_to(bmi[i] * h * h, 2);
  }
  return w;
}

inline std::pair<std::vector<double>, std::vector<double>> derive_height_weight(
    std::span<const double> bmi, Rng& rng) {
  for (std::size_t i = 0; i < bmi.size(); ++i) {
    if (!(bmi[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveBmi, "BMI at row " + std::to_string(i) + " is not positive");
    }
  }
  std::vector<double> height(bmi.size());
  for (auto& h : height) h = round_to(kHeightModel.sample(rng), 2);
  auto weight = weights_for(bmi, height);
  return {std::move(height), std::move(weight)};
}

// ---- whole-table generation --------------------------------------------------------

struct CorrelationDiagnostics {
  std::string col_a;
  std::string col_b;
  InducedPair pair;
  bool skipped = false;
};

struct MarginDiagnostics {
  std::string column;
  Margin margin;
};

struct GenerationManifest {
  GenerationConfig config;
  std::vector<std::string> columns;
  std::vector<CorrelationDiagnostics> correlations;
  std::vector<MarginDiagnostics> margins;
};

struct GenerationResult {
  Table table;
  GenerationManifest manifest;
};

/// Schema of generated tables: profile columns in order, then every derived
/// rule's outputs in rule order.
inline Schema output_schema(const StatisticalProfile& profile, const std::vector<DerivedFeatureRule>& rules) {
  std::vector<ColumnSpec> specs;
  for (const auto& c : profile.columns) specs.push_back(c.spec);
  for (const auto& rule : rules) {
    if (const auto* e = std::get_if<ExpInverse>(&rule)) {
      const ColumnSpec& raw = profile.column(e->raw_out).spec;
      std::optional<std::string> unit;
      if (raw.unit) unit = "ln(" + *raw.unit + ")";
      specs.push_back(ColumnSpec{e->log_col, ColumnKind::continuous, unit, std::nullopt, {}});
    } else {
      const auto& b = std::get<BmiToHeightWeight>(rule);
      specs.push_back(ColumnSpec{b.height_out, ColumnKind::continuous, "cm", std::nullopt, {}});
      specs.push_back(ColumnSpec{b.weight_out, ColumnKind::continuous, "kg", std::nullopt, {}});
    }
  }
  return Schema(std::move(specs));
}

inline Schema output_schema(const StatisticalProfile& profile) {
  return output_schema(profile, profile.derived_rules);
}

inline GenerationResult generate_with_manifest(const StatisticalProfile& profile,
                                               const GenerationConfig& config) {
  config.validate();
  const std::size_t n = config.n;
  const Rng root(config.seed);
  const Schema schema = output_schema(profile);

  std::vector<Margin> margins;
  for (const auto& col : profile.columns) {
    const auto* s = col.continuous();
    margins.push_back(margin_for(col, s ? resolve_decimals(config, col.spec.name, *s) : -1));
  }
  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < profile.columns.size(); ++i) {
      if (profile.columns[i].spec.name == name) return i;
    }
    throw Error(ErrorKind::UnknownColumn, "flagged correlation names unknown column " + name);
  };

  // values[c] holds real values or discrete codes for profile column c.
  std::vector<std::vector<double>> values(profile.columns.size());
  std::vector<bool> filled(profile.columns.size(), false);
  GenerationManifest manifest;
  manifest.config = config;
  manifest.columns = schema.names();

  for (std::size_t k = 0; k < profile.flagged_correlations.size(); ++k) {
    const auto& f = profile.flagged_correlations[k];
    const std::size_t ia = index_of(f.col_a);
    const std::size_t ib = index_of(f.col_b);
    CorrelationDiagnostics diag{f.col_a, f.col_b, {}, false};
    if (filled[ia] || filled[ib]) {
      // A column already coupled to another partner keeps that coupling.
      diag.skipped = true;
      manifest.correlations.push_back(std::move(diag));
      continue;
    }
    diag.pair = induce_correlation(margins[ia], margins[ib], f.r, n, root.substream(1000 + k),
                                   config.correlation_tolerance, config.max_calibration_iters,
                                   config.pilot_size);
    values[ia] = diag.pair.a;
    values[ib] = diag.pair.b;
    filled[ia] = filled[ib] = true;
    manifest.correlations.push_back(std::move(diag));
  }

  for (std::size_t c = 0; c < profile.columns.size(); ++c) {
    if (filled[c]) continue;
    Rng rng = root.substream(c);
    const Margin& m = margins[c];
    if (m.discrete()) {
      std::vector<double> codes;
      for (std::size_t i = 0; const auto& [label, count] : allocate_categories(m.proportions, n)) {
        codes.insert(codes.end(), count, m.levels[i++]);
      }
      rng.shuffle(std::span<double>(codes));
      values[c] = std::move(codes);
    } else {
      values[c] = draw_from_margin(m, n, rng).raw;
    }
    filled[c] = true;
  }
  for (std::size_t c = 0; c < margins.size(); ++c) {
    if (!margins[c].discrete()) manifest.margins.push_back({margins[c].name, margins[c]});
  }

  std::vector<std::vector<double>> derived;
  for (std::size_t k = 0; k < profile.derived_rules.size(); ++k) {
    const auto& rule = profile.derived_rules[k];
    if (const auto* e = std::get_if<ExpInverse>(&rule)) {
      const auto& raw = values[index_of(e->raw_out)];
      std::vector<double> logs(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!(raw[i] > 0.0)) throw Error(ErrorKind::NonPositiveValue, e->raw_out + " not positive");
        logs[i] = std::log(raw[i]);
      }
      derived.push_back(std::move(logs));
    } else {
      const auto& b = std::get<BmiToHeightWeight>(rule);
      Rng rng = root.substream(2000 + k);
      auto [h, w] = derive_height_weight(values[index_of(b.bmi_col)], rng);
      derived.push_back(std::move(h));
      derived.push_back(std::move(w));
    }
  }

  std::vector<Row> rows(n);
  for (std::size_t r = 0; r < n; ++r) {
    Row& row = rows[r];
    row.reserve(schema.size());
    for (std::size_t c = 0; c < profile.columns.size(); ++c) {
      const double v = values[c][r];
      const Margin& m = margins[c];
      switch (m.kind) {
        case ColumnKind::continuous: row.emplace_back(v); break;
        case ColumnKind::ordinal: row.emplace_back(static_cast<std::int64_t>(std::llround(v))); break;
        default: row.emplace_back(m.labels[static_cast<std::size_t>(v)]); break;
      }
    }
    for (const auto& d : derived) row.emplace_back(d[r]);
  }
  return {Table(schema, std::move(rows)), std::move(manifest)};
}

inline Table generate(const StatisticalProfile& profile, const GenerationConfig& config) {
  return generate_with_manifest(profile, config).table;
}

inline nlohmann::json manifest_to_json(const GenerationManifest& m) {
  nlohmann::json rounding = nlohmann::json::object();
  for (const auto& [k, v] : m.config.rounding) rounding[k] = v;
  nlohmann::json corr = nlohmann::json::array();
  for (const auto& c : m.correlations) {
    nlohmann::json j = {{"col_a", c.col_a}, {"col_b", c.col_b}, {"skipped", c.skipped}};
    if (!c.skipped) {
      j["r_target"] = c.pair.r_target;
      j["pilot_latent_rho"] = c.pair.pilot_rho;
      j["pilot_r"] = c.pair.pilot_r;
      j["latent_rho"] = c.pair.rho;
      j["realized_r"] = c.pair.realized_r;
      j["attainable_min"] = c.pair.frechet_min;
      j["attainable_max"] = c.pair.frechet_max;
      j["calibration_iterations"] = c.pair.iterations;
    }
    corr.push_back(j);
  }
  nlohmann::json margins = nlohmann::json::array();
  for (const auto& d : m.margins) {
    nlohmann::json j = {{"column", d.column}, {"log_scale", d.margin.log_scale},
                        {"decimals", d.margin.decimals}, {"lower", d.margin.lower},
                        {"upper", d.margin.upper}};
    if (d.margin.constant) {
      j["constant"] = *d.margin.constant;
    } else {
      j["parent_mu"] = d.margin.dist.mu;
      j["parent_sigma"] = d.margin.dist.sigma;
      j["moment_matched"] = d.margin.moment_matched;
    }
    margins.push_back(j);
  }
  return {{"seed", m.config.seed},
          {"n", m.config.n},
          {"correlation_tolerance", m.config.correlation_tolerance},
          {"max_calibration_iters", m.config.max_calibration_iters},
          {"pilot_size", m.config.pilot_size},
          {"rounding", rounding},
          {"columns", m.columns},
          {"correlations", corr},
          {"continuous_margins", margins}};
}

}  // namespace tabsynth

#endif  // TABSYNTH_GENERATOR_HPP
