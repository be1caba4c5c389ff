// Command-line front end.
//
//   spwave run <config> [--out DIR] [--replicas M] [--seed S] [--threads N]
//   spwave oracle-suite [--out DIR]
//   spwave rates <errors.csv> [--out DIR]
//   spwave dump-noise <config> [--out DIR] [--replica R] [--seed S]
//
// Exit codes: 0 success, 1 configuration or input error, 2 numerical
// blow-up, 3 oracle check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spwave/errors.hpp"
#include "spwave/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitOracle = 3;

void print_rates(const std::vector<spwave::RateRow>& rates) {
  for (const auto& r : rates)
    std::printf("%-24s alpha=%-6g slope=%+.4f r2=%.4f (%zu points)\n", r.experiment.c_str(), r.alpha, r.fit.slope,
                r.fit.r2, r.fit.nu.size());
}

int report_oracle(const std::vector<spwave::OracleCheck>& checks) {
  for (const auto& c : checks)
    std::printf("%s  %-44s %s error %.3e (tol %.1e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.measure.c_str(), c.error, c.tolerance);
  const bool ok = spwave::all_passed(checks);
  std::printf("oracle suite: %s\n", ok ? "all checks passed" : "FAILED");
  return ok ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for the damped stochastic wave equation and its small-mass limits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spwave::kVersion);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::size_t> replicas;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string errors_path;
  std::size_t replica = 0;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config,--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--replicas", replicas, "Override experiment.replicas");
  run->add_option("--seed", seed, "Override experiment.seed");
  run->add_option("--threads", threads, "OpenMP threads for the replica loop")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle-suite", "Closed-form checks of the integrators");
  oracle->add_option("--out", out_dir, "Output directory for summary.json");

  auto* rates = app.add_subcommand("rates", "Fit convergence rates from an errors.csv file");
  rates->add_option("errors,--errors", errors_path, "errors.csv")->required()->check(CLI::ExistingFile);
  rates->add_option("--out", out_dir, "Directory for rates.csv (stdout only when omitted)");

  auto* dump = app.add_subcommand("dump-noise", "Write the master noise path of one replica");
  dump->add_option("config,--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  dump->add_option("--out", out_dir, "Output directory");
  dump->add_option("--replica", replica, "Replica index");
  dump->add_option("--seed", seed, "Override experiment.seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      spwave::ExperimentConfig config = spwave::load_config(config_path);
      if (replicas) config.replicas = *replicas;
      if (seed) config.seed = *seed;
      config.validate();
      const spwave::RunRecord record = spwave::run_experiment(config, {threads});
      spwave::write_outputs(record, out_dir);
      std::printf("%s: %zu nu values x %zu replicas, %.2f s, outputs in %s\n",
                  spwave::to_string(config.kind).c_str(), config.nu.size(), config.replicas, record.wall_seconds,
                  out_dir.c_str());
      print_rates(record.rates);
      for (const auto& note : record.notes) std::printf("note: %s\n", note.c_str());
      if (config.kind == spwave::ExperimentKind::oracle_suite) return report_oracle(record.oracle);
      return 0;
    }
    if (*oracle) {
      spwave::ExperimentConfig config;
      config.kind = spwave::ExperimentKind::oracle_suite;
      const spwave::RunRecord record = spwave::run_experiment(config);
      spwave::write_outputs(record, out_dir);
      return report_oracle(record.oracle);
    }
    if (*rates) {
      std::vector<std::string> notes;
      const auto rows = spwave::error_rates(spwave::read_errors_csv(errors_path), &notes);
      if (rates->count("--out") > 0) {
        std::filesystem::create_directories(out_dir);
        spwave::write_rates_csv(rows, std::filesystem::path(out_dir) / "rates.csv");
      }
      print_rates(rows);
      for (const auto& note : notes) std::printf("note: %s\n", note.c_str());
      return 0;
    }
    if (*dump) {
      spwave::ExperimentConfig config = spwave::load_config(config_path);
      if (seed) config.seed = *seed;
      const spwave::NoisePath path = spwave::replica_path(config, replica);
      std::filesystem::create_directories(out_dir);
      const auto file = std::filesystem::path(out_dir) / ("noise_replica" + std::to_string(replica) + ".bin");
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error(file.string() + ": cannot open for writing");
      spwave::write_path(out, path);
      if (!out) throw std::runtime_error(file.string() + ": write failed");
      std::printf("wrote %s (seed %llu, N=%zu, J=%zu)\n", file.string().c_str(),
                  static_cast<unsigned long long>(path.seed()), path.modes(), path.steps());
      return 0;
    }
  } catch (const spwave::ConfigError& e) {
    std::fprintf(stderr, "config error:\n");
    for (const auto& v : e.violations()) std::fprintf(stderr, "  %s\n", v.c_str());
    return kExitConfig;
  } catch (const spwave::BlowUpError& e) {
    std::fprintf(stderr, "numerical blow-up: %s\n", e.what());
    return kExitBlowUp;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
