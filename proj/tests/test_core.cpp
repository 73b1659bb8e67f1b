#include <filesystem>
#include <fstream>
#include <numeric>

#include "support.hpp"
#include "tabsynth/transforms.hpp"

using namespace tabsynth;
using namespace tstest;

// ---- rng ----------------------------------------------------------------------

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, SubstreamDoesNotAdvanceParent) {
  Rng a(7), b(7);
  Rng s1 = a.substream(3);
  Rng s2 = a.substream(3);
  EXPECT_EQ(s1.next_u64(), s2.next_u64());
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(a.substream(1).next_u64(), a.substream(2).next_u64());
}

TEST(Rng, UniformIsOpenUnitInterval) {
  Rng r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng r(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> v(trial);
    std::iota(v.begin(), v.end(), 0);
    r.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < trial; ++i) ASSERT_EQ(sorted[i], i);
  }
}

// ---- numeric ----------------------------------------------------------------------

TEST(Numeric, RoundTo) {
  EXPECT_DOUBLE_EQ(round_to(72.254, 2), 72.25);
  EXPECT_DOUBLE_EQ(round_to(-1.5, 0), -2.0);
  EXPECT_DOUBLE_EQ(round_to(3.14159, -1), 3.14159);
}

TEST(Numeric, QuantileInvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.5, 0.8, 0.97575, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 + 1e-9 * p) << p;
  }
  EXPECT_EQ(normal_quantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
  EXPECT_TS_ERROR(normal_quantile(1.5), OutOfRange);
}

/// Truncated-normal mean and SD by Simpson integration of the density.
static std::pair<double, double> integrate_moments(const TruncatedNormal& t) {
  const int n = 20000;
  const double h = (t.upper - t.lower) / n;
  double z = 0, m1 = 0, m2 = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = t.lower + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    const double f = w * normal_pdf((x - t.mu) / t.sigma);
    z += f;
    m1 += f * x;
    m2 += f * x * x;
  }
  const double mean = m1 / z;
  return {mean, std::sqrt(m2 / z - mean * mean)};
}

TEST(Numeric, TruncatedNormalMomentsMatchIntegration) {
  for (const TruncatedNormal& t : {TruncatedNormal{0, 1, -1, 2}, TruncatedNormal{10, 2, 4, 16},
                                   TruncatedNormal{4.0, 0.08, 4.17, 4.5}, TruncatedNormal{-3, 0.5, 0, 1}}) {
    const auto [m, s] = integrate_moments(t);
    EXPECT_NEAR(t.mean(), m, 1e-7);
    EXPECT_NEAR(t.stddev(), s, 1e-6);
  }
}

TEST(Numeric, TruncatedQuantileStaysInBoundsFarInTail) {
  const TruncatedNormal t{0, 1, 8, 9};
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = t.sample(r);
    ASSERT_GE(x, 8.0);
    ASSERT_LE(x, 9.0);
  }
}

TEST(Numeric, FitTruncatedNormalHitsTargets) {
  const auto fit = fit_truncated_normal(70.3, 4.7, 65, 90);
  ASSERT_TRUE(fit);
  EXPECT_NEAR(fit->mean(), 70.3, 1e-6);
  EXPECT_NEAR(fit->stddev(), 4.7, 1e-6);
  // A uniform-like target is reachable only in the limit; SD above the
  // uniform's is infeasible.
  EXPECT_FALSE(fit_truncated_normal(0.5, 0.9, 0, 1));
}

TEST(Numeric, PearsonExamples) {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
  EXPECT_NEAR(*pearson(x, y), 0.8, 1e-15);
  const std::vector<double> a{1, 2, 3}, b{2, 4, 6};
  EXPECT_DOUBLE_EQ(*pearson(a, b), 1.0);
  const std::vector<double> flat{5, 5, 5};
  EXPECT_FALSE(pearson(a, flat));
  EXPECT_TS_ERROR(pearson(x, a), LengthMismatch);
}

TEST(Numeric, PearsonMatchesOracleOnRandomData) {
  Rng r(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + index_below(r, 40);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = uniform_in(r, -5, 5);
      y[i] = 0.5 * x[i] + uniform_in(r, -5, 5);
    }
    EXPECT_NEAR(*pearson(x, y), naive_pearson(x, y), 1e-12);
  }
}

// ---- schema ----------------------------------------------------------------------------

TEST(Schema, ColumnSpecValidation) {
  EXPECT_TS_ERROR((ColumnSpec{"b", ColumnKind::binary, {}, {}, {"a", "b", "c"}}.validate()), InvalidSchema);
  EXPECT_TS_ERROR((ColumnSpec{"c", ColumnKind::categorical, {}, {}, {"only"}}.validate()), InvalidSchema);
  EXPECT_TS_ERROR((ColumnSpec{"c", ColumnKind::categorical, {}, {}, {"x", "x"}}.validate()), InvalidSchema);
  EXPECT_TS_ERROR((ColumnSpec{"o", ColumnKind::ordinal, {}, Bounds{0.5, 3}, {}}.validate()), InvalidSchema);
  EXPECT_TS_ERROR((ColumnSpec{"o", ColumnKind::ordinal, {}, std::nullopt, {}}.validate()), InvalidSchema);
  EXPECT_TS_ERROR((ColumnSpec{"x", ColumnKind::continuous, {}, Bounds{2, 1}, {}}.validate()), InvalidSchema);
  EXPECT_NO_THROW((ColumnSpec{"x", ColumnKind::continuous, "kg", Bounds{1, 1}, {}}.validate()));
}

TEST(Schema, DuplicateColumnsRejected) {
  const ColumnSpec a{"a", ColumnKind::continuous, {}, {}, {}};
  EXPECT_TS_ERROR(Schema({a, a}), InvalidSchema);
}

TEST(Schema, OrdinalLabelsAndCodes) {
  const ColumnSpec o{"o", ColumnKind::ordinal, {}, Bounds{0, 4}, {}};
  EXPECT_EQ(o.labels(), (std::vector<std::string>{"0", "1", "2", "3", "4"}));
  const ColumnSpec b{"b", ColumnKind::binary, {}, {}, {"No", "Yes"}};
  EXPECT_EQ(b.code_of("Yes"), 1u);
  EXPECT_FALSE(b.code_of("Maybe"));
}

TEST(Schema, JsonRoundTrip) {
  const Schema& s = fixture_schema();
  EXPECT_EQ(schema_from_json(schema_to_json(s)), s);
  EXPECT_EQ(s.size(), 12u);
  EXPECT_TS_ERROR(parse_column_kind("nominal"), InvalidSchema);
  EXPECT_TS_ERROR(schema_from_json(nlohmann::json::parse(R"({"columns":[{"name":"a"}]})")), InvalidSchema);
  EXPECT_TS_ERROR(schema_from_json(nlohmann::json::parse(R"({"cols":[]})")), InvalidSchema);
}

// ---- table / csv ---------------------------------------------------------------------------

TEST(Table, FixtureLoads) {
  const Table& t = fixture();
  EXPECT_EQ(t.row_count(), 139u);
  EXPECT_EQ(t.column_count(), 12u);
}

TEST(Table, MissingColumnReported) {
  std::vector<ColumnSpec> specs = fixture_schema().columns();
  specs.push_back({"Histology2", ColumnKind::continuous, {}, {}, {}});
  EXPECT_TS_ERROR(load_table(data_path("fixture.csv"), Schema(specs)), MissingColumn);
}

TEST(Table, BadCellIsTypeMismatchWithLocation) {
  const Schema s({{"Age", ColumnKind::continuous, {}, {}, {}}});
  try {
    table_from_csv_text("Age\n70\nabc\n", s);
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TypeMismatch);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("Age"), std::string::npos);
  }
}

TEST(Table, DuplicateHeader) {
  const Schema s({{"a", ColumnKind::continuous, {}, {}, {}}});
  EXPECT_TS_ERROR(table_from_csv_text("a,a\n1,2\n", s), DuplicateHeader);
}

TEST(Table, HeaderOrderIgnoredAndExtrasSkipped) {
  const Schema s({{"a", ColumnKind::continuous, {}, {}, {}}, {"b", ColumnKind::binary, {}, {}, {"N", "Y"}}});
  const Table t = table_from_csv_text("extra,b,a\r\nz,Y,1.5\r\n", s);
  EXPECT_EQ(t.at(0, 0), Cell(1.5));
  EXPECT_EQ(t.at(0, 1), Cell(std::string("Y")));
  LoadOptions strict;
  strict.ignore_extra_columns = false;
  EXPECT_TS_ERROR(table_from_csv_text("extra,b,a\nz,Y,1.5\n", s, strict), SchemaMismatch);
}

TEST(Table, OutOfBoundsOrUnknownLabelRejected) {
  const Schema s({{"o", ColumnKind::ordinal, {}, Bounds{0, 4}, {}}, {"b", ColumnKind::binary, {}, {}, {"N", "Y"}}});
  EXPECT_TS_ERROR(table_from_csv_text("o,b\n5,N\n", s), TypeMismatch);
  EXPECT_TS_ERROR(table_from_csv_text("o,b\n1,Q\n", s), TypeMismatch);
  EXPECT_TS_ERROR(table_from_csv_text("o,b\n1.5,N\n", s), TypeMismatch);
}

TEST(Csv, ParserHandlesQuotesBomAndUnterminated) {
  const auto rec = csv::parse("\xEF\xBB\xBF" "a,\"b,\"\"c\"\"\"\n\"multi\nline\",\n");
  ASSERT_EQ(rec.size(), 2u);
  EXPECT_EQ(rec[0][1], "b,\"c\"");
  EXPECT_EQ(rec[1][0], "multi\nline");
  EXPECT_EQ(rec[1][1], "");
  EXPECT_TS_ERROR(csv::parse("a,\"open\n"), ParseError);
}

TEST(Csv, RoundTripProperty) {
  Rng r(2024);
  for (int i = 0; i < 300; ++i) {
    const Table t = random_table(r);
    const Table back = table_from_csv_text(table_to_csv_text(t), t.schema());
    ASSERT_EQ(back, t) << table_to_csv_text(t);
  }
}

TEST(Csv, SaveLoadFixtureIdentical) {
  const auto path = std::filesystem::temp_directory_path() / "tabsynth_roundtrip.csv";
  save_table(fixture(), path.string());
  EXPECT_EQ(load_table(path.string(), fixture_schema()), fixture());
  std::filesystem::remove(path);
}

TEST(Csv, MissingCellsWrittenEmpty) {
  const Schema s({{"a", ColumnKind::continuous, {}, {}, {}}, {"b", ColumnKind::ordinal, {}, Bounds{0, 2}, {}}});
  const Table t(s, {{std::monostate{}, std::int64_t{1}}, {2.5, std::monostate{}}});
  EXPECT_EQ(table_to_csv_text(t), "a,b\n,1\n2.5,\n");
}

TEST(Csv, UnwritablePathIsIoFailure) {
  EXPECT_TS_ERROR(save_table(fixture(), "/nonexistent-dir/x/out.csv"), IoFailure);
  EXPECT_TS_ERROR(load_table("/nonexistent-dir/in.csv", fixture_schema()), IoFailure);
}

// ---- transforms ---------------------------------------------------------------------------------

static Schema kps_schema() {
  return Schema({{"kps_pre", ColumnKind::ordinal, {}, Bounds{0, 100}, {}},
                 {"kps_dis", ColumnKind::ordinal, {}, Bounds{0, 100}, {}}});
}

TEST(Transforms, KpsDeteriorationRule) {
  const Table t(kps_schema(), {{std::int64_t{80}, std::int64_t{70}}, {std::int64_t{80}, std::int64_t{80}},
                               {std::int64_t{60}, std::int64_t{90}}});
  const Dichotomize d{"kps_dis", {Compare::lt, 0.0, "kps_pre"}, "deterioration", std::vector<std::string>{"No", "Yes"}};
  const Table out = apply_transforms(t, {d});
  EXPECT_EQ(out.label_values("deterioration"), (std::vector<std::string>{"Yes", "No", "No"}));
  EXPECT_EQ(out.schema().at("deterioration").kind, ColumnKind::binary);
}

TEST(Transforms, DichotomizeIdempotentOnBinary) {
  const Schema s({{"b", ColumnKind::binary, {}, {}, {"No", "Yes"}}});
  const Table t(s, {{std::string("No")}, {std::string("Yes")}, {std::monostate{}}});
  const Dichotomize d{"b", {Compare::gt, 0.5, std::nullopt}, std::nullopt, std::nullopt};
  const Table once = apply_transforms(t, {d});
  EXPECT_EQ(once, t);
  EXPECT_EQ(apply_transforms(once, {d}), once);
}

TEST(Transforms, SumComponentsAndNonBinary) {
  std::vector<ColumnSpec> specs;
  Row row;
  for (int i = 0; i < 5; ++i) {
    specs.push_back({"m" + std::to_string(i), ColumnKind::binary, {}, {}, {"0", "1"}});
    row.emplace_back(std::string(i % 2 == 0 ? "1" : "0"));
  }
  specs.push_back({"x", ColumnKind::continuous, {}, {}, {}});
  row.emplace_back(1.0);
  const Table t(Schema(specs), {row});
  const Table out = apply_transforms(t, {SumComponents{{"m0", "m1", "m2", "m3", "m4"}, "MCS"}});
  EXPECT_EQ(out.at(0, 6), Cell(std::int64_t{3}));
  EXPECT_EQ(*out.schema().at("MCS").bounds, (Bounds{0, 5}));
  EXPECT_TS_ERROR(apply_transforms(t, {SumComponents{{"m0", "x"}, "bad"}}), NonBinaryComponent);
}

TEST(Transforms, NaturalLogDomain) {
  const Schema s({{"LOS", ColumnKind::continuous, "days", {}, {}}});
  const Table ok(s, {{1.0}, {std::exp(2.0)}});
  const Table out = apply_transforms(ok, {NaturalLog{"LOS", "ln_LOS"}});
  EXPECT_DOUBLE_EQ(std::get<double>(out.at(1, 1)), 2.0);
  EXPECT_EQ(*out.schema().at("ln_LOS").unit, "ln(days)");
  const Table zero(s, {{0.0}});
  EXPECT_TS_ERROR(apply_transforms(zero, {NaturalLog{"LOS", "ln_LOS"}}), NonPositiveValue);
}

TEST(Transforms, DateDiffAndDropRows) {
  const Schema s({{"surgery", ColumnKind::date, {}, {}, {}}, {"discharge", ColumnKind::date, {}, {}, {}}});
  const Table t(s, {{*parse_iso_date("2020-02-27"), *parse_iso_date("2020-03-02")},
                    {*parse_iso_date("2021-01-01"), std::monostate{}}});
  const Table out = apply_transforms(t, {DateDiffDays{"surgery", "discharge", "LOS"},
                                         DropRows{{"LOS", std::nullopt, 0.0}}});
  ASSERT_EQ(out.row_count(), 1u);
  EXPECT_EQ(out.at(0, 2), Cell(4.0));  // 2020 is a leap year
  const Table neg = apply_transforms(out, {DropRows{{"LOS", Compare::lt, 5.0}}});
  EXPECT_EQ(neg.row_count(), 0u);
}

TEST(Transforms, ErrorsAndCollisions) {
  const Table t(kps_schema(), {{std::int64_t{80}, std::int64_t{70}}});
  EXPECT_TS_ERROR(apply_transforms(t, {NaturalLog{"nope", "x"}}), UnknownColumn);
  EXPECT_TS_ERROR(apply_transforms(t, {NaturalLog{"kps_pre", "kps_dis"}}), ColumnCollision);
  EXPECT_TS_ERROR(apply_transforms(t, {DropColumns{{"nope"}}}), UnknownColumn);
}

TEST(Transforms, InputUntouchedAndSchemaArithmetic) {
  Rng r(77);
  for (int i = 0; i < 100; ++i) {
    const Table t = random_table(r, 10);
    const Table copy = t;
    std::vector<Transform> tr;
    std::set<std::string> expected;
    for (const auto& c : t.schema().columns()) expected.insert(c.name);
    const auto& first = t.schema()[0];
    if (first.kind == ColumnKind::continuous || first.kind == ColumnKind::ordinal) {
      tr.push_back(Dichotomize{first.name, {Compare::ge, 0.0, std::nullopt}, "flag", std::nullopt});
      expected.insert("flag");
    }
    if (t.schema().size() > 1) {
      tr.push_back(DropColumns{{t.schema()[1].name}});
      expected.erase(t.schema()[1].name);
    }
    const Table out = apply_transforms(t, tr);
    EXPECT_EQ(t, copy);
    const auto names = out.schema().names();
    EXPECT_EQ(std::set<std::string>(names.begin(), names.end()), expected);
    EXPECT_EQ(out.row_count(), t.row_count());
  }
}

TEST(Transforms, JsonForm) {
  const auto j = nlohmann::json::parse(R"([
    {"op": "dichotomize", "column": "kps_dis", "baseline": "kps_pre", "compare": "<", "threshold": 0,
     "out": "det", "labels": ["No", "Yes"]},
    {"op": "drop_rows", "predicate": {"column": "det", "compare": "==", "value": "No"}},
    {"op": "drop_columns", "columns": ["kps_pre"]}
  ])");
  const auto tr = transforms_from_json(j);
  const Table t(kps_schema(), {{std::int64_t{80}, std::int64_t{70}}, {std::int64_t{50}, std::int64_t{60}}});
  const Table out = apply_transforms(t, tr);
  EXPECT_EQ(out.row_count(), 1u);
  EXPECT_EQ(out.schema().names(), (std::vector<std::string>{"kps_dis", "det"}));
  EXPECT_TS_ERROR(transform_from_json(nlohmann::json::parse(R"({"op":"explode"})")), InvalidArgument);
  EXPECT_TS_ERROR(transform_from_json(nlohmann::json::parse(R"({"op":"natural_log"})")), ParseError);
}
