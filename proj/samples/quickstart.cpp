// Profile a real table, generate a 10x synthetic copy, then validate and score it.
// Usage: quickstart [data-dir]

#include <cstdio>
#include <string>

#include "tabsynth/csv.hpp"
#include "tabsynth/generator.hpp"
#include "tabsynth/metrics.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/promptkit.hpp"
#include "tabsynth/tstr.hpp"

#ifndef TABSYNTH_DATA_DIR
#define TABSYNTH_DATA_DIR "data"
#endif

int main(int argc, char** argv) {
  using namespace tabsynth;
  const std::string dir = argc > 1 ? argv[1] : TABSYNTH_DATA_DIR;
  try {
    const Schema schema = load_schema(dir + "/schema.json");
    const Table real = load_table(dir + "/fixture.csv", schema);

    ProfileOptions opts;
    opts.bmi_column = "BMI";
    const StatisticalProfile profile = extract_profile(real, opts);
    std::printf("profiled %zu rows, %zu columns, %zu flagged correlations\n", profile.n, profile.columns.size(),
                profile.flagged_correlations.size());

    GenerationConfig cfg;
    cfg.n = 10 * profile.n;
    cfg.seed = 7;
    const Table synth = generate(profile, cfg);

    const auto check = validate_dataset(synth, profile, profile.derived_rules, cfg.n);
    std::printf("%s", validation_summary(check).c_str());

    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& f : profile.flagged_correlations) pairs.emplace_back(f.col_a, f.col_b);
    const auto fidelity = evaluate(real, synth, schema, pairs);
    for (const auto& [metric, agg] : fidelity.aggregates) {
      std::printf("%-22s %.3f (n=%zu)\n", metric.c_str(), agg.mean, agg.count);
    }

    const auto tstr = run_tstr(synth, real, TstrConfig{});
    std::printf("TSTR best F1 %.3f at threshold %.2f\n", tstr.sweep.best().f1, tstr.sweep.best().threshold);
  } catch (const Error& e) {
    std::fprintf(stderr, "quickstart: %s\n", e.what());
    return 1;
  }
  return 0;
}
