#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tabsynth/csv.hpp"
#include "tabsynth/generator.hpp"

using namespace tabsynth;
using namespace tstest;

namespace {

CategoricalSummary props(std::vector<std::pair<std::string, double>> p) { return CategoricalSummary{std::move(p)}; }

std::size_t count_of(const std::vector<std::pair<std::string, std::size_t>>& v, const std::string& label) {
  for (const auto& [l, c] : v) {
    if (l == label) return c;
  }
  return 0;
}

Margin binary_margin(double p_yes) {
  ColumnSpec spec{"b", ColumnKind::binary, std::nullopt, std::nullopt, {"No", "Yes"}};
  return discrete_margin(spec, props({{"No", 1.0 - p_yes}, {"Yes", p_yes}}));
}

Margin normal_margin(const std::string& name) {
  ContinuousSummary s;
  s.mean = 0.0;
  s.sd = 1.0;
  s.min = -4.0;
  s.max = 4.0;
  return continuous_margin(name, s, -1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GenerationConfig config(std::size_t n, std::uint64_t seed) {
  GenerationConfig c;
  c.n = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Allocate, Examples) {
  const auto half = allocate_categories(props({{"M", 0.5}, {"F", 0.5}}), 139);
  EXPECT_EQ(count_of(half, "M"), 70u);
  EXPECT_EQ(count_of(half, "F"), 69u);
  const auto even = allocate_categories(props({{"M", 0.5}, {"F", 0.5}}), 140);
  EXPECT_EQ(count_of(even, "M"), 70u);
  EXPECT_EQ(count_of(even, "F"), 70u);

  const auto hist = allocate_categories(*fixture_profile().column("Histology").categorical(), 1390);
  EXPECT_NEAR(static_cast<double>(count_of(hist, "Meningioma")), 470.0, 1.0);
}

TEST(Allocate, Errors) {
  EXPECT_TS_ERROR(allocate_categories(props({}), 10), InvalidArgument);
  EXPECT_TS_ERROR(allocate_categories(props({{"a", -0.1}, {"b", 1.1}}), 10), InvalidArgument);
  EXPECT_TS_ERROR(allocate_categories(props({{"a", 0.0}}), 10), InvalidArgument);
}

TEST(Allocate, PropertyHamilton) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + index_below(rng, 10);
    std::vector<std::pair<std::string, double>> p;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w = rng.below(4) == 0 ? 0.0 : uniform_in(rng, 0.0, 1.0);
      p.emplace_back("L" + std::to_string(i), w);
      total += w;
    }
    if (total == 0.0) p[0].second = total = 1.0;
    const std::size_t n = index_below(rng, 3000);
    const auto counts = allocate_categories(props(p), n);
    ASSERT_EQ(counts.size(), k);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(counts[i].first, p[i].first);
      const double quota = static_cast<double>(n) * p[i].second / total;
      EXPECT_LT(std::abs(static_cast<double>(counts[i].second) - quota), 1.0 + 1e-9);
      if (p[i].second == 0.0) EXPECT_EQ(counts[i].second, 0u);
      sum += counts[i].second;
    }
    EXPECT_EQ(sum, n);
  }
}

TEST(SampleContinuous, MeanWithinTwoStandardErrors) {
  ContinuousSummary s;
  s.mean = 10.0;
  s.sd = 2.0;
  s.min = 4.0;
  s.max = 16.0;
  // A 2 SE band should cover the sample mean for ~95% of seeds.
  const double se = 2.0 / std::sqrt(1390.0);
  int covered = 0;
  std::vector<double> means;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto d = sample_continuous(s, 1390, rng);
    ASSERT_EQ(d.raw.size(), 1390u);
    EXPECT_TRUE(d.log.empty());
    for (double x : d.raw) {
      ASSERT_GE(x, 4.0);
      ASSERT_LE(x, 16.0);
    }
    means.push_back(naive_mean(d.raw));
    covered += std::abs(means.back() - 10.0) <= 2.0 * se;
  }
  EXPECT_GE(covered, 180);
  EXPECT_NEAR(naive_mean(means), 10.0, 2.0 * se / std::sqrt(200.0));
}

TEST(SampleContinuous, ZeroSdGivesConstant) {
  ContinuousSummary s;
  s.mean = 7.5;
  s.min = s.max = 7.5;
  Rng rng(1);
  const auto d = sample_continuous(s, 25, rng);
  EXPECT_EQ(d.raw, std::vector<double>(25, 7.5));
}

TEST(SampleContinuous, LogScaleRoundsRawFirst) {
  const auto& s = *fixture_profile().column("LOS").continuous();
  Rng rng(9);
  const auto d = sample_continuous(s, 500, rng, 0);
  ASSERT_EQ(d.log.size(), 500u);
  for (std::size_t i = 0; i < d.raw.size(); ++i) {
    EXPECT_EQ(d.raw[i], std::round(d.raw[i]));
    EXPECT_EQ(d.log[i], std::log(d.raw[i]));
    EXPECT_GE(d.raw[i], s.min);
    EXPECT_LE(d.raw[i], s.max);
  }
}

TEST(Margins, DegenerateAndInvalid) {
  ContinuousSummary s;
  s.mean = 1.0;
  s.sd = 1.0;
  s.min = s.max = 1.0;
  EXPECT_TS_ERROR(continuous_margin("x", s, -1), DegenerateBounds);
  s.sd = -1.0;
  s.max = 2.0;
  EXPECT_TS_ERROR(continuous_margin("x", s, -1), InvalidArgument);
}

TEST(Induce, InfeasibleTarget) {
  Rng rng(3);
  const Margin a = binary_margin(0.01);
  const Margin b = binary_margin(0.01);
  Margin skew = binary_margin(0.01);
  skew.proportions = props({{"No", 0.99}, {"Yes", 0.01}});
  EXPECT_TS_ERROR(induce_correlation(binary_margin(0.5), skew, 0.95, 1390, rng), InfeasibleTarget);
  EXPECT_TS_ERROR(induce_correlation(a, b, 1.0, 100, rng), OutOfRange);
}

TEST(Induce, ZeroTarget) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pair = induce_correlation(normal_margin("a"), normal_margin("b"), 0.0, 1390, Rng(seed));
    EXPECT_LE(std::abs(pair.realized_r), 0.05);
    EXPECT_NEAR(naive_pearson(pair.a, pair.b), pair.realized_r, 1e-12);
  }
}

TEST(Induce, HitsTargetAndKeepsMargins) {
  const Margin a = binary_margin(0.3);
  ColumnSpec ord{"o", ColumnKind::ordinal, std::nullopt, Bounds{0, 3}, {}};
  const Margin b = discrete_margin(ord, props({{"0", 0.4}, {"1", 0.3}, {"2", 0.2}, {"3", 0.1}}));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pair = induce_correlation(a, b, 0.57, 1390, Rng(seed));
    EXPECT_NEAR(pair.realized_r, 0.57, 0.05);
    EXPECT_NEAR(naive_pearson(pair.a, pair.b), pair.realized_r, 1e-12);
    EXPECT_EQ(std::count(pair.a.begin(), pair.a.end(), 1.0), 417);
    EXPECT_EQ(std::count(pair.b.begin(), pair.b.end(), 3.0), 139);
    EXPECT_LE(pair.frechet_min, 0.57);
    EXPECT_GE(pair.frechet_max, 0.57);
  }
}

TEST(Induce, CalibrationFailed) {
  EXPECT_TS_ERROR(induce_correlation(binary_margin(0.5), binary_margin(0.5), 0.33, 10, Rng(1), 1e-4), CalibrationFailed);
}

TEST(Induce, CategoricalRejected) {
  ColumnSpec cat{"c", ColumnKind::categorical, std::nullopt, std::nullopt, {"x", "y"}};
  const Margin c = discrete_margin(cat, props({{"x", 0.5}, {"y", 0.5}}));
  EXPECT_TS_ERROR(induce_correlation(c, binary_margin(0.5), 0.2, 100, Rng(1)), NonNumericColumn);
}

TEST(HeightWeight, Examples) {
  const std::vector<double> bmi = {25.0};
  const std::vector<double> h = {170.0};
  EXPECT_EQ(weights_for(bmi, h), std::vector<double>{72.25});
  const std::vector<double> zero = {0.0};
  EXPECT_TS_ERROR(weights_for(zero, h), NonPositiveBmi);
  Rng rng(1);
  EXPECT_TS_ERROR(derive_height_weight(zero, rng), NonPositiveBmi);
  const std::vector<double> two = {1.0, 2.0};
  EXPECT_TS_ERROR(weights_for(two, h), LengthMismatch);
}

TEST(HeightWeight, FixtureHeights) {
  const auto bmi = fixture().numeric_values("BMI");
  Rng rng(kFixtureSeed);
  const auto [h, w] = derive_height_weight(bmi, rng);
  const double mh = naive_mean(h);
  EXPECT_GE(mh, 166.74);
  EXPECT_LE(mh, 174.87);
  for (std::size_t i = 0; i < bmi.size(); ++i) {
    EXPECT_GE(h[i], 145.0);
    EXPECT_LE(h[i], 200.0);
    EXPECT_EQ(h[i], round_to(h[i], 2));
    EXPECT_NEAR(w[i] / ((h[i] / 100) * (h[i] / 100)), bmi[i], 0.01);
  }
}

TEST(Generate, OutputSchema) {
  const Schema s = output_schema(fixture_profile());
  const std::vector<std::string> tail = {"ln_Age", "ln_LOS", "Height", "Weight"};
  ASSERT_EQ(s.size(), 16u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s[12 + i].name, tail[i]);
  EXPECT_EQ(*s.at("Height").unit, "cm");
}

TEST(Generate, FixtureRegeneratesFromSeedProfile) {
  const Table t = generate(seed_profile(), config(139, kFixtureSeed));
  const Table reread = table_from_csv_text(table_to_csv_text(t), fixture_schema());
  EXPECT_EQ(table_to_csv_text(reread), read_file(data_path("fixture.csv")));
}

TEST(Generate, IdentitiesAndBounds) {
  const auto& p = fixture_profile();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Table t = generate(p, config(1390, seed));
    ASSERT_EQ(t.row_count(), 1390u);
    for (const char* c : {"Age", "LOS"}) {
      const auto raw = t.numeric_values(c);
      const auto ln = t.numeric_values(std::string("ln_") + c);
      for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_EQ(ln[i], std::log(raw[i]));
    }
    const auto bmi = t.numeric_values("BMI");
    const auto h = t.numeric_values("Height");
    const auto w = t.numeric_values("Weight");
    for (std::size_t i = 0; i < bmi.size(); ++i) EXPECT_EQ(w[i], round_to(bmi[i] * (h[i] / 100) * (h[i] / 100), 2));
    for (const auto& col : p.columns) {
      if (const auto* s = col.continuous()) {
        for (double x : t.numeric_values(col.spec.name)) {
          EXPECT_GE(x, s->min);
          EXPECT_LE(x, s->max);
        }
      }
    }
    const double r = naive_pearson(t.numeric_values("KPS_deterioration"), t.numeric_values("Landriel"));
    EXPECT_NEAR(r, p.flagged_correlations[0].r, 0.05);
  }
}

TEST(Generate, QuotasExact) {
  const auto& p = fixture_profile();
  const Table t = generate(p, config(1390, 4));
  for (const auto& col : p.columns) {
    const auto* s = col.categorical();
    if (!s) continue;
    const auto quota = allocate_categories(*s, 1390);
    const auto labels = t.label_values(col.spec.name);
    for (const auto& [label, count] : quota) {
      EXPECT_EQ(static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label)), count) << col.spec.name << " " << label;
    }
  }
}

TEST(Generate, Deterministic) {
  const auto& p = fixture_profile();
  const auto a = generate_with_manifest(p, config(300, 42));
  const auto b = generate_with_manifest(p, config(300, 42));
  EXPECT_EQ(table_to_csv_text(a.table), table_to_csv_text(b.table));
  EXPECT_EQ(manifest_to_json(a.manifest).dump(), manifest_to_json(b.manifest).dump());
  EXPECT_NE(table_to_csv_text(generate(p, config(300, 43))), table_to_csv_text(a.table));
  const auto j = manifest_to_json(a.manifest);
  EXPECT_EQ(j.at("seed"), 42);
  EXPECT_EQ(j.at("correlations").size(), 1u);
  EXPECT_FALSE(j.at("correlations")[0].at("skipped").get<bool>());
}

TEST(Generate, RoundingOverride) {
  auto c = config(200, 8);
  c.rounding["BMI"] = 0;
  const Table t = generate(fixture_profile(), c);
  for (double x : t.numeric_values("BMI")) EXPECT_EQ(x, std::round(x));
}

TEST(Generate, ConfigErrors) {
  EXPECT_TS_ERROR(generate(fixture_profile(), config(1, 0)), InvalidArgument);
  auto c = config(100, 0);
  c.correlation_tolerance = 0.0;
  EXPECT_TS_ERROR(generate(fixture_profile(), c), InvalidArgument);
  c = config(100, 0);
  c.max_calibration_iters = 0;
  EXPECT_TS_ERROR(generate(fixture_profile(), c), InvalidArgument);
}

TEST(Generate, SharedColumnSkipsLaterPair) {
  auto p = fixture_profile();
  p.flagged_correlations.push_back({"Landriel", "MCS", 0.3});
  const auto res = generate_with_manifest(p, config(200, 1));
  ASSERT_EQ(res.manifest.correlations.size(), 2u);
  EXPECT_TRUE(res.manifest.correlations[1].skipped);
}
