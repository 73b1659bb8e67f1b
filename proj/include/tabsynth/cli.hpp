#ifndef TABSYNTH_CLI_HPP
#define TABSYNTH_CLI_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tabsynth/csv.hpp"
#include "tabsynth/error.hpp"
#include "tabsynth/generator.hpp"
#include "tabsynth/metrics.hpp"
#include "tabsynth/profile.hpp"
#include "tabsynth/promptkit.hpp"
#include "tabsynth/report.hpp"
#include "tabsynth/schema.hpp"
#include "tabsynth/table.hpp"
#include "tabsynth/tstr.hpp"

namespace tabsynth {

enum ExitCode : int { kExitOk = 0, kExitValidationFailed = 1, kExitUsage = 2, kExitRuntime = 3 };

namespace cli_detail {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_json(const std::string& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

inline std::pair<std::string, std::string> split_label(const std::string& text) {
  const auto pos = text.find('=');
  if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) {
    throw Error(ErrorKind::InvalidArgument, "expected LABEL=PATH, got '" + text + "'");
  }
  return {text.substr(0, pos), text.substr(pos + 1)};
}

inline void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace cli_detail

struct ProfileArgs {
  std::string real, schema, out;
  double threshold = 0.5;
  bool no_auto_log = false;
  std::vector<std::string> force_log, no_log;
  std::string bmi_column, height_column = "Height", weight_column = "Weight";
};

struct GenerateArgs {
  std::string profile, out, manifest, out_dir, real, schema;
  std::size_t n = 139;
  std::uint64_t seed = 0;
  double tolerance = 0.05;
  int max_iters = 50;
  std::size_t pilot = 5000;
  std::map<std::string, int> rounding;
  std::size_t trials = 0;
  unsigned threads = 1;
};

struct PromptArgs {
  std::string profile, out;
  std::size_t n = 139;
};

struct ValidateArgs {
  std::string profile, data, out, summary;
  std::size_t n = 0;
};

struct EvaluateArgs {
  std::string real, synth, schema, profile, out, csv;
  std::vector<std::string> pairs, log_scale;
  double tolerance = 0.0;
};

struct TstrArgs {
  std::string real, synth, schema, out, target = "KPS_deterioration";
  int stages = 50;
  std::uint64_t seed = 0;
  bool include_log = false;
  std::vector<std::string> exclude;
};

struct ReportArgs {
  std::vector<std::string> fidelity, tstr;
  std::string out, markdown;
};

inline int cmd_profile(const ProfileArgs& a, std::ostream& out) {
  const Schema schema = load_schema(a.schema);
  const Table real = load_table(a.real, schema);
  ProfileOptions opts;
  opts.correlation_threshold = a.threshold;
  opts.auto_log = !a.no_auto_log;
  opts.force_log = a.force_log;
  opts.no_log = a.no_log;
  if (!a.bmi_column.empty()) opts.bmi_column = a.bmi_column;
  opts.height_column = a.height_column;
  opts.weight_column = a.weight_column;
  cli_detail::emit(a.out, profile_to_json(extract_profile(real, opts)).dump(2) + "\n", out);
  return kExitOk;
}

inline GenerationConfig generation_config(const GenerateArgs& a) {
  GenerationConfig c;
  c.n = a.n;
  c.seed = a.seed;
  c.correlation_tolerance = a.tolerance;
  c.max_calibration_iters = a.max_iters;
  c.pilot_size = a.pilot;
  c.rounding = a.rounding;
  return c;
}

inline std::string trial_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%02zu", t + 1);
  return buf;
}

inline int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const StatisticalProfile profile = load_profile(a.profile);
  if (a.trials == 0) {
    const auto res = generate_with_manifest(profile, generation_config(a));
    cli_detail::emit(a.out, table_to_csv_text(res.table), out);
    std::string manifest = a.manifest;
    if (manifest.empty() && !a.out.empty() && a.out != "-") manifest = a.out + ".manifest.json";
    if (!manifest.empty()) cli_detail::write_json(manifest, manifest_to_json(res.manifest));
    return kExitOk;
  }

  // Repeated generations: trial t uses seed + t and writes its own files.
  if (a.out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "--trials needs --out-dir");
  std::filesystem::create_directories(a.out_dir);
  std::vector<std::optional<GenerationResult>> results(a.trials);
  parallel_for(a.trials, a.threads, [&](std::size_t t) {
    GenerationConfig c = generation_config(a);
    c.seed = a.seed + t;
    results[t] = generate_with_manifest(profile, c);
  });
  std::vector<std::string> names;
  std::vector<Table> tables;
  for (std::size_t t = 0; t < a.trials; ++t) {
    names.push_back(trial_name(t));
    const auto base = (std::filesystem::path(a.out_dir) / names.back()).string();
    save_table(results[t]->table, base + ".csv");
    cli_detail::write_json(base + ".manifest.json", manifest_to_json(results[t]->manifest));
    tables.push_back(results[t]->table);
  }
  if (!a.real.empty()) {
    if (a.schema.empty()) throw Error(ErrorKind::InvalidArgument, "ranking trials needs --schema");
    const Schema schema = load_schema(a.schema);
    const Table real = load_table(a.real, schema);
    std::vector<Table> projected;
    for (const auto& t : tables) projected.push_back(t.select(schema.names()));
    const auto ranks = rank_trials(real, projected, schema);
    cli_detail::write_json((std::filesystem::path(a.out_dir) / "ranking.json").string(),
                           {{"trials", names}, {"rankings", rankings_to_json(ranks, names)}});
  }
  return kExitOk;
}

inline int cmd_prompt(const PromptArgs& a, std::ostream& out) {
  cli_detail::emit(a.out, emit_prompt(load_profile(a.profile), a.n), out);
  return kExitOk;
}

inline int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const StatisticalProfile profile = load_profile(a.profile);
  const Table table = load_for_validation(cli_detail::read_text(a.data), profile, profile.derived_rules);
  std::optional<std::size_t> rows;
  if (a.n > 0) rows = a.n;
  const auto report = validate_dataset(table, profile, profile.derived_rules, rows);
  if (!a.out.empty()) cli_detail::write_json(a.out, validation_to_json(report));
  cli_detail::emit(a.summary, validation_summary(report), out);
  return report.pass() ? kExitOk : kExitValidationFailed;
}

inline int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const Schema schema = load_schema(a.schema);
  const Table real = load_table(a.real, schema);
  const Table synth = load_table(a.synth, schema);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : a.pairs) pairs.push_back(parse_pair(p));
  if (pairs.empty() && !a.profile.empty()) {
    for (const auto& f : load_profile(a.profile).flagged_correlations) pairs.emplace_back(f.col_a, f.col_b);
  }
  EvaluateOptions opts;
  opts.numeric_tolerance = a.tolerance;
  opts.log_scale_columns = a.log_scale;
  const auto report = evaluate(real, synth, schema, pairs, opts);
  cli_detail::emit(a.out, fidelity_to_json(report).dump(2) + "\n", out);
  if (!a.csv.empty()) write_text_file(a.csv, fidelity_to_csv(report));
  return kExitOk;
}

inline int cmd_tstr(const TstrArgs& a, std::ostream& out) {
  const Schema schema = load_schema(a.schema);
  const Table real = load_table(a.real, schema);
  const Table synth = load_table(a.synth, schema);
  TstrConfig cfg;
  cfg.target = a.target;
  cfg.n_stages = a.stages;
  cfg.seed = a.seed;
  cfg.include_log_columns = a.include_log;
  cfg.exclude_columns = a.exclude;
  cli_detail::emit(a.out, tstr_to_json(run_tstr(synth, real, cfg)).dump(2) + "\n", out);
  return kExitOk;
}

inline int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<DatasetSummary> rows;
  auto row_for = [&](const std::string& label) -> DatasetSummary& {
    for (auto& r : rows) {
      if (r.label == label) return r;
    }
    rows.push_back({label, {}, {}, {}});
    return rows.back();
  };
  for (const auto& f : a.fidelity) {
    const auto [label, path] = cli_detail::split_label(f);
    row_for(label).metrics = aggregates_from_fidelity_json(read_json_file(path));
  }
  for (const auto& t : a.tstr) {
    const auto [label, path] = cli_detail::split_label(t);
    const auto j = read_json_file(path);
    auto& row = row_for(label);
    row.tstr_f1 = j.at("best").at("f1").get<double>();
    row.tstr_threshold = j.at("best").at("threshold").get<double>();
  }
  cli_detail::emit(a.out, comparison_to_json(rows).dump(2) + "\n", out);
  if (!a.markdown.empty()) write_text_file(a.markdown, comparison_to_markdown(rows));
  return kExitOk;
}

/// Parses argv and runs one subcommand. Exit codes: 0 success, 1 validation
/// failure, 2 usage error, 3 runtime error.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Synthetic tabular data workbench: profile, generate, prompt, validate, evaluate, tstr, report"};
  app.name("tabsynth");
  app.set_config("--config", "", "TOML file with default option values; command-line flags win");
  app.require_subcommand(1, 1);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Summarize a real CSV into a profile JSON");
  profile->add_option("--real", pa.real, "Real data CSV")->required()->check(CLI::ExistingFile);
  profile->add_option("--schema", pa.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  profile->add_option("--out", pa.out, "Profile JSON (stdout if omitted)");
  profile->add_option("--threshold", pa.threshold, "Flag correlations with |r| above this")->capture_default_str();
  profile->add_flag("--no-auto-log", pa.no_auto_log, "Do not log-transform skewed columns");
  profile->add_option("--force-log", pa.force_log, "Always log-transform these columns");
  profile->add_option("--no-log", pa.no_log, "Never log-transform these columns");
  profile->add_option("--bmi-column", pa.bmi_column, "Add a height/weight rule driven by this BMI column");
  profile->add_option("--height-column", pa.height_column)->capture_default_str();
  profile->add_option("--weight-column", pa.weight_column)->capture_default_str();

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Sample a synthetic table from a profile");
  generate->add_option("--profile", ga.profile, "Profile JSON")->required()->check(CLI::ExistingFile);
  generate->add_option("--n", ga.n, "Rows to generate")->capture_default_str();
  generate->add_option("--seed", ga.seed, "Random seed")->capture_default_str();
  generate->add_option("--out", ga.out, "Synthetic CSV (stdout if omitted)");
  generate->add_option("--manifest", ga.manifest, "Manifest JSON (default: <out>.manifest.json)");
  generate->add_option("--tolerance", ga.tolerance, "Correlation tolerance")->capture_default_str();
  generate->add_option("--max-iters", ga.max_iters, "Calibration iteration cap")->capture_default_str();
  generate->add_option("--pilot", ga.pilot, "Pilot sample size for calibration")->capture_default_str();
  generate->add_option("--round", ga.rounding, "Per-column decimals, e.g. --round BMI 2");
  generate->add_option("--trials", ga.trials, "Independent generations with seeds seed, seed+1, ...");
  generate->add_option("--out-dir", ga.out_dir, "Directory for per-trial files");
  generate->add_option("--real", ga.real, "Real CSV used to rank trials")->check(CLI::ExistingFile);
  generate->add_option("--schema", ga.schema, "Schema JSON used to rank trials")->check(CLI::ExistingFile);
  generate->add_option("--threads", ga.threads, "Worker threads for --trials")->capture_default_str();

  PromptArgs pra;
  auto* prompt = app.add_subcommand("prompt", "Write the plain-language generation prompt");
  prompt->add_option("--profile", pra.profile, "Profile JSON")->required()->check(CLI::ExistingFile);
  prompt->add_option("--n", pra.n, "Requested patient count")->capture_default_str();
  prompt->add_option("--out", pra.out, "Prompt text file (stdout if omitted)");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a generated CSV against its profile");
  validate->add_option("--profile", va.profile, "Profile JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--data", va.data, "CSV to validate")->required()->check(CLI::ExistingFile);
  validate->add_option("--n", va.n, "Expected row count (default: profile n)");
  validate->add_option("--out", va.out, "ValidationReport JSON");
  validate->add_option("--summary", va.summary, "Text summary (stdout if omitted)");

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score synthetic data against real data");
  evaluate_cmd->add_option("--real", ea.real, "Real CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--synth", ea.synth, "Synthetic CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--schema", ea.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--profile", ea.profile, "Take correlation pairs from this profile")
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--pair", ea.pairs, "Correlation pair A:B (repeatable)");
  evaluate_cmd->add_option("--tolerance", ea.tolerance, "Row-match tolerance as a share of column range")
      ->capture_default_str();
  evaluate_cmd->add_option("--log-scale", ea.log_scale, "Score these continuous columns on ln scale");
  evaluate_cmd->add_option("--out", ea.out, "FidelityReport JSON (stdout if omitted)");
  evaluate_cmd->add_option("--csv", ea.csv, "Flat metric,columns,score CSV");

  TstrArgs ta;
  auto* tstr = app.add_subcommand("tstr", "Train on synthetic data, test on real data");
  tstr->add_option("--real", ta.real, "Real CSV")->required()->check(CLI::ExistingFile);
  tstr->add_option("--synth", ta.synth, "Synthetic CSV")->required()->check(CLI::ExistingFile);
  tstr->add_option("--schema", ta.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  tstr->add_option("--target", ta.target, "Binary target column")->capture_default_str();
  tstr->add_option("--stages", ta.stages, "Boosting stages")->capture_default_str();
  tstr->add_option("--seed", ta.seed, "Seed recorded with the model")->capture_default_str();
  tstr->add_flag("--include-log", ta.include_log, "Also use ln_ columns as features");
  tstr->add_option("--exclude", ta.exclude, "Feature columns to drop");
  tstr->add_option("--out", ta.out, "TSTRReport JSON (stdout if omitted)");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Merge fidelity and TSTR reports into one comparison");
  report->add_option("--fidelity", ra.fidelity, "LABEL=fidelity.json (repeatable)");
  report->add_option("--tstr", ra.tstr, "LABEL=tstr.json (repeatable)");
  report->add_option("--out", ra.out, "Comparison JSON (stdout if omitted)");
  report->add_option("--markdown", ra.markdown, "Comparison as a Markdown table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*profile) return cmd_profile(pa, out);
    if (*generate) return cmd_generate(ga, out);
    if (*prompt) return cmd_prompt(pra, out);
    if (*validate) return cmd_validate(va, out);
    if (*evaluate_cmd) return cmd_evaluate(ea, out);
    if (*tstr) return cmd_tstr(ta, out);
    if (*report) return cmd_report(ra, out);
  } catch (const Error& e) {
    err << "tabsynth: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "tabsynth: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace tabsynth

#endif  // TABSYNTH_CLI_HPP
