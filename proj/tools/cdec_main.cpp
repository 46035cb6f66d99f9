// Batch front end for the credal/interval evidential classifiers.
//
// Verbs: cdec, idec, metrics, synth, ablate. Data goes to files; progress
// and timing go to standard error. Exit codes: 0 success, 2 usage error,
// 3 data error, 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdec/data_io.hpp"
#include "cdec/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int classify_error(const cdec::Error &e) {
  if (dynamic_cast<const cdec::ConvergenceFailure *>(&e) ||
      dynamic_cast<const cdec::NonFinite *>(&e))
    return kExitNumerical;
  return kExitData;
}

// Bad flag/config values are usage errors, not data errors.
struct UsageError : cdec::Error {
  using cdec::Error::Error;
};

struct CommonFlags {
  std::string input, output, config_path;
  double gamma = -1.0, epsilon = -1.0;
  bool exact_ihdr = false;
  int jobs = 1;
  std::uint64_t seed = 0;
  bool strict = false;
  bool collapse_ensemble = false;
};

void add_run_flags(CLI::App *cmd, CommonFlags &flags, bool idec) {
  cmd->add_option("--input", flags.input, "Sample file (JSONL)")->required();
  cmd->add_option("--output", flags.output, "Report file (JSONL)")->required();
  cmd->add_option("--config", flags.config_path, "Config file (JSON object)");
  cmd->add_option("--gamma", flags.gamma, "Miscoverage level in (0, 1)");
  cmd->add_option("--epsilon", flags.epsilon, "Uncertainty slack threshold");
  cmd->add_flag("--exact-ihdr", flags.exact_ihdr,
                "Exhaustive minimum-cardinality regions (k <= 20)");
  cmd->add_option("--jobs", flags.jobs, "Worker pool size")->default_val(1);
  cmd->add_option("--seed", flags.seed, "RNG seed recorded in the config");
  cmd->add_flag("--strict", flags.strict, "Stop at the first failing sample");
  if (idec)
    cmd->add_flag("--collapse-ensemble", flags.collapse_ensemble,
                  "Keep the first member when a record has S > 1");
}

cdec::RunConfig resolve_config(const CommonFlags &flags, CLI::App *cmd,
                               const std::string &mode) {
  cdec::RunConfig config;
  if (!flags.config_path.empty()) config = cdec::load_config(flags.config_path);
  config.mode = mode;
  if (cmd->count("--gamma")) config.gamma = flags.gamma;
  if (cmd->count("--epsilon")) config.epsilon = flags.epsilon;
  if (cmd->count("--exact-ihdr")) config.exact_ihdr = flags.exact_ihdr;
  if (cmd->count("--seed")) config.seed = flags.seed;
  try {
    config.check();
  } catch (const cdec::Error &e) {
    throw UsageError(e.what());
  }
  return config;
}

int finish_run(const cdec::BatchResult &result, const cdec::RunConfig &,
               const std::string &output) {
  cdec::write_report(result.records, result.summary, output);
  if (!result.summary.failed_ids.empty()) {
    std::cerr << result.summary.failed_ids.size() << " sample(s) failed:";
    for (const auto &id : result.summary.failed_ids) std::cerr << ' ' << id;
    std::cerr << '\n';
  }
  if (result.had_numerical_error) return kExitNumerical;
  if (result.had_data_error) return kExitData;
  return 0;
}

std::vector<int> parse_grid(const std::string &grid_text) {
  std::vector<int> grid;
  std::stringstream stream(grid_text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    grid.push_back(std::stoi(token));
  }
  if (grid.empty()) throw cdec::Error("empty ablation grid");
  return grid;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Credal and interval evidential classification toolkit"};
  app.require_subcommand(1);

  CommonFlags cdec_flags, idec_flags, metrics_flags, ablate_flags;
  std::string grid_text = "1,3,5,7,10";

  auto *cmd_cdec = app.add_subcommand(
      "cdec", "Credal decisions: reduce, decompose, emit IHDRs or abstain");
  add_run_flags(cmd_cdec, cdec_flags, false);

  auto *cmd_idec = app.add_subcommand(
      "idec", "Interval decisions: per-sample optimal inflation d*");
  add_run_flags(cmd_idec, idec_flags, true);

  auto *cmd_metrics = app.add_subcommand(
      "metrics", "ECE, AUROC/AUPRC per score kind, and region statistics");
  cmd_metrics->add_option("--input", metrics_flags.input, "Report file (JSONL)")
      ->required();
  cmd_metrics->add_option("--output", metrics_flags.output, "Metrics file")
      ->required();
  cmd_metrics->add_option("--config", metrics_flags.config_path, "Config file");

  cdec::SyntheticSpec spec;
  std::string synth_output;
  auto *cmd_synth = app.add_subcommand(
      "synth", "Generate a synthetic ensemble corpus");
  cmd_synth->add_option("--output", synth_output, "Sample file to write")
      ->required();
  cmd_synth->add_option("--k", spec.k, "Number of classes")->default_val(10);
  cmd_synth->add_option("--s", spec.s, "Ensemble size")->default_val(3);
  cmd_synth->add_option("--n-id", spec.n_id, "In-distribution samples")
      ->default_val(100);
  cmd_synth->add_option("--n-ood", spec.n_ood, "OoD samples")->default_val(0);
  cmd_synth->add_option("--concentration-id", spec.concentration_id,
                        "Dirichlet concentration of iD base pmfs")
      ->default_val(1.0);
  cmd_synth->add_option("--concentration-ood", spec.concentration_ood,
                        "Dirichlet concentration of OoD base pmfs")
      ->default_val(1.0);
  cmd_synth->add_option("--spread-id", spec.spread_id,
                        "Member concentration around the iD base "
                        "(smaller = more disagreement)")
      ->default_val(100.0);
  cmd_synth->add_option("--spread-ood", spec.spread_ood,
                        "Member concentration around the OoD base")
      ->default_val(1.0);
  cmd_synth->add_option("--seed", spec.seed, "RNG seed")->default_val(0);

  auto *cmd_ablate = app.add_subcommand(
      "ablate", "Credal decisions over nested prefix ensembles per grid S");
  add_run_flags(cmd_ablate, ablate_flags, false);
  cmd_ablate->add_option("--grid", grid_text, "Comma-separated ensemble sizes")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - started)
        .count();
  };

  try {
    if (cmd_cdec->parsed()) {
      const auto config = resolve_config(cdec_flags, cmd_cdec, "cdec");
      const auto samples = cdec::load_samples(cdec_flags.input, config.pmf_tol);
      std::cerr << "cdec: " << samples.size() << " samples\n";
      cdec::BatchOptions options;
      options.jobs = cdec_flags.jobs;
      options.strict = cdec_flags.strict;
      const auto result = cdec::run_cdec_batch(samples, config, options);
      const int code = finish_run(result, config, cdec_flags.output);
      std::cerr << "cdec: done in " << elapsed_ms() << " ms\n";
      return code;
    }
    if (cmd_idec->parsed()) {
      const auto config = resolve_config(idec_flags, cmd_idec, "idec");
      const auto samples = cdec::load_samples(idec_flags.input, config.pmf_tol);
      std::cerr << "idec: " << samples.size() << " samples\n";
      cdec::BatchOptions options;
      options.jobs = idec_flags.jobs;
      options.strict = idec_flags.strict;
      options.collapse_ensemble = idec_flags.collapse_ensemble;
      const auto result = cdec::run_idec_batch(samples, config, options);
      const int code = finish_run(result, config, idec_flags.output);
      std::cerr << "idec: done in " << elapsed_ms() << " ms\n";
      return code;
    }
    if (cmd_metrics->parsed()) {
      cdec::RunConfig config;
      if (!metrics_flags.config_path.empty())
        config = cdec::load_config(metrics_flags.config_path);
      const auto report = cdec::load_report(metrics_flags.input);
      const auto scored = cdec::to_scored_samples(report.records);
      const auto metrics = cdec::compute_metrics(scored, config);
      cdec::write_metrics(metrics, metrics_flags.output);
      std::cerr << "metrics: done in " << elapsed_ms() << " ms\n";
      return 0;
    }
    if (cmd_synth->parsed()) {
      const auto records = cdec::generate_synthetic(spec);
      cdec::write_samples(records, synth_output);
      std::cerr << "synth: wrote " << records.size() << " records in "
                << elapsed_ms() << " ms\n";
      return 0;
    }
    if (cmd_ablate->parsed()) {
      const auto config = resolve_config(ablate_flags, cmd_ablate, "cdec");
      const auto samples =
          cdec::load_samples(ablate_flags.input, config.pmf_tol);
      cdec::BatchOptions options;
      options.jobs = ablate_flags.jobs;
      options.strict = ablate_flags.strict;
      const auto rows =
          cdec::run_ablate(samples, config, parse_grid(grid_text), options);
      cdec::write_ablate(rows, ablate_flags.output);
      for (const auto &row : rows)
        std::cerr << "ablate S=" << row.s << ": size=" << row.mean_region_size
                  << " cov=" << row.coverage << " au=" << row.mean_au
                  << " eu=" << row.mean_eu << " tu=" << row.mean_tu << '\n';
      std::cerr << "ablate: done in " << elapsed_ms() << " ms\n";
      return 0;
    }
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cdec::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return classify_error(e);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
