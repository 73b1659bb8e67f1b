#ifndef TABSYNTH_TESTS_SUPPORT_HPP
#define TABSYNTH_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tabsynth/csv.hpp"
#include "tabsynth/error.hpp"
#include "tabsynth/generator.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/rng.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"
#include "tabsynth/tstr.hpp"

#ifndef TABSYNTH_DATA_DIR
#define TABSYNTH_DATA_DIR "data"
#endif

#define EXPECT_TS_ERROR(stmt, k)                                              \
  do {                                                                        \
    try {                                                                     \
      stmt;                                                                   \
      ADD_FAILURE() << "expected " #k " but nothing was thrown";              \
    } catch (const tabsynth::Error& e_) {                                     \
      EXPECT_EQ(e_.kind(), tabsynth::ErrorKind::k) << e_.what();              \
    }                                                                         \
  } while (0)

namespace tstest {

using namespace tabsynth;

inline std::string data_path(const std::string& name) { return std::string(TABSYNTH_DATA_DIR) + "/" + name; }

inline const Schema& fixture_schema() {
  static const Schema s = load_schema(data_path("schema.json"));
  return s;
}

inline const Table& fixture() {
  static const Table t = load_table(data_path("fixture.csv"), fixture_schema());
  return t;
}

inline ProfileOptions fixture_options() {
  ProfileOptions o;
  o.bmi_column = "BMI";
  return o;
}

inline const StatisticalProfile& fixture_profile() {
  static const StatisticalProfile p = extract_profile(fixture(), fixture_options());
  return p;
}

inline const StatisticalProfile& seed_profile() {
  static const StatisticalProfile p = load_profile(data_path("seed_profile.json"));
  return p;
}

inline constexpr std::uint64_t kFixtureSeed = 139;

// ---- hand-rolled generators ----------------------------------------------------

inline double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline std::size_t index_below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.below(n)); }

/// Values with deliberate ties: drawn from a small grid half of the time.
inline std::vector<double> random_sample(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  const bool gridded = rng.below(2) == 0;
  for (auto& x : v) x = gridded ? static_cast<double>(rng.below(6)) : uniform_in(rng, -3.0, 3.0);
  return v;
}

inline std::string random_label(Rng& rng, std::size_t i) {
  static const std::vector<std::string> stems = {"a", "b,c", "say \"hi\"", "line\nbreak", "  pad ", "x"};
  return stems[index_below(rng, stems.size())] + std::to_string(i);
}

inline double awkward_double(Rng& rng) {
  switch (rng.below(5)) {
    case 0: return uniform_in(rng, -1e6, 1e6);
    case 1: return std::ldexp(uniform_in(rng, 0.5, 1.0), static_cast<int>(rng.below(200)) - 100);
    case 2: return round_to(uniform_in(rng, 0, 100), 2);
    case 3: return -0.0;
    default: return 0.1 * static_cast<double>(rng.below(1000));
  }
}

/// Random schema of 1..6 columns across every kind, and rows with ~10% missing cells.
inline Table random_table(Rng& rng, std::size_t max_rows = 20) {
  std::vector<ColumnSpec> specs;
  const std::size_t ncols = 1 + index_below(rng, 6);
  for (std::size_t c = 0; c < ncols; ++c) {
    ColumnSpec s;
    s.name = "c" + std::to_string(c) + (rng.below(3) == 0 ? ",q" : "");
    switch (rng.below(5)) {
      case 0: s.kind = ColumnKind::continuous; break;
      case 1: s.kind = ColumnKind::ordinal; s.bounds = Bounds{-2, static_cast<double>(rng.below(5))}; break;
      case 2: {
        s.kind = ColumnKind::categorical;
        const std::size_t k = 2 + index_below(rng, 4);
        for (std::size_t i = 0; i < k; ++i) s.categories.push_back(random_label(rng, i));
        break;
      }
      case 3: s.kind = ColumnKind::binary; s.categories = {"No", "Yes"}; break;
      default: s.kind = ColumnKind::date; break;
    }
    specs.push_back(std::move(s));
  }
  Schema schema(specs);
  std::vector<Row> rows(index_below(rng, max_rows + 1));
  for (auto& row : rows) {
    for (const auto& s : specs) {
      if (rng.below(10) == 0) {
        row.emplace_back(std::monostate{});
        continue;
      }
      switch (s.kind) {
        case ColumnKind::continuous: row.emplace_back(awkward_double(rng)); break;
        case ColumnKind::ordinal:
          row.emplace_back(static_cast<std::int64_t>(s.bounds->min) +
                           static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s.bounds->max - s.bounds->min) + 1)));
          break;
        case ColumnKind::date: row.emplace_back(Date{static_cast<std::int32_t>(rng.below(40000)) - 5000}); break;
        default: row.emplace_back(s.categories[index_below(rng, s.categories.size())]); break;
      }
    }
  }
  return Table(schema, std::move(rows));
}

// ---- independent oracles --------------------------------------------------------------

/// Two-pass mean with long double accumulation.
inline double naive_mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  long double m = s / v.size();
  long double c = 0;
  for (double x : v) c += x - m;
  return static_cast<double>(m + c / v.size());
}

inline double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = naive_mean(x), my = naive_mean(y);
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// KS statistic by evaluating both ECDFs at every observed point, counting directly.
inline double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> points(a);
  points.insert(points.end(), b.begin(), b.end());
  double d = 0.0;
  for (double t : points) {
    const auto fa = std::count_if(a.begin(), a.end(), [&](double x) { return x <= t; });
    const auto fb = std::count_if(b.begin(), b.end(), [&](double x) { return x <= t; });
    d = std::max(d, std::abs(static_cast<double>(fa) / static_cast<double>(a.size()) -
                             static_cast<double>(fb) / static_cast<double>(b.size())));
  }
  return d;
}

struct OracleStump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double error = 0.0;
};

/// Exhaustive stump search: every feature, every midpoint of sorted unique
/// values, both polarities, error summed directly; first strict improvement wins.
inline OracleStump brute_stump(const FeatureMatrix& x, const std::vector<int>& y, const std::vector<double>& w) {
  double total = 0.0;
  for (double wi : w) total += wi;
  std::optional<OracleStump> best;
  for (std::size_t f = 0; f < x.front().size(); ++f) {
    std::set<double> uniq;
    for (const auto& row : x) uniq.insert(row[f]);
    std::vector<double> u(uniq.begin(), uniq.end());
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      const double t = u[i] + (u[i + 1] - u[i]) / 2.0;
      for (int pol : {1, -1}) {
        double err = 0.0;
        for (std::size_t r = 0; r < x.size(); ++r) {
          const int pred = x[r][f] > t ? pol : -pol;
          if ((pred == 1) != (y[r] == 1)) err += w[r];
        }
        if (!best || err < best->error - kStumpTieTolerance) best = OracleStump{f, t, pol, err};
      }
    }
  }
  if (!best) {
    double pos = 0.0;
    for (std::size_t r = 0; r < y.size(); ++r) pos += y[r] == 1 ? w[r] : 0.0;
    best = pos <= total - pos + kStumpTieTolerance ? OracleStump{0, x[0][0], 1, pos}
                                                   : OracleStump{0, x[0][0], -1, total - pos};
  }
  best->error /= total;
  return *best;
}

/// Random small classification problem with both classes present.
inline std::pair<FeatureMatrix, std::vector<int>> random_dataset(Rng& rng, std::size_t max_rows, std::size_t max_features) {
  const std::size_t n = 2 + index_below(rng, max_rows - 1);
  const std::size_t k = 1 + index_below(rng, max_features);
  FeatureMatrix x(n, std::vector<double>(k));
  std::vector<int> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& v : x[r]) v = rng.below(2) ? static_cast<double>(rng.below(5)) : round_to(uniform_in(rng, -2, 2), 3);
    y[r] = static_cast<int>(rng.below(2));
  }
  y[0] = 0;
  y[1] = 1;
  return {x, y};
}

}  // namespace tstest

#endif  // TABSYNTH_TESTS_SUPPORT_HPP
