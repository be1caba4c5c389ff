#pragma once

// Experiment orchestration and persistence.
//
// Every replica draws one master noise path from its derived seed; all
// models compared within the replica consume that path. Replicas run on an
// OpenMP team and are reduced in (nu, replica) order, so results do not depend
// on the thread count.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spwave/analysis.hpp"
#include "spwave/config.hpp"
#include "spwave/oracle.hpp"

namespace spwave {

inline constexpr const char* kVersion = "0.1.0";

struct RateRow {
  std::string experiment;
  double alpha = 0.0;
  RateFit fit;
};

/// Ensemble mean and standard error of one scalar statistic at one nu.
struct StatRow {
  double nu = 0.0;
  std::string statistic;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct AuditRecord {
  double nu = 0.0;
  std::uint64_t seed = 0;
  AuditTable table;
};

struct RunRecord {
  ExperimentConfig config;
  std::string version = kVersion;
  std::vector<ErrorReport> errors;  // nu-major, then replica
  std::vector<StatRow> statistics;
  std::vector<RateRow> rates;
  std::vector<AuditRecord> audits;
  std::vector<OracleCheck> oracle;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;
};

struct RunOptions {
  int threads = 1;
};

/// Runs the experiment named by config.kind. Blow-ups are rethrown as
/// BlowUpError with the offending nu and seed in the message.
RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Master noise path of replica r.
NoisePath replica_path(const ExperimentConfig& config, std::size_t replica);

/// Rate rows from per-replica error reports, one pair per alpha: the replica
/// mean of the sup error at each nu fitted as is ("sup_error") and after
/// scaling by nu^-alpha for alpha < 1 or nu^-1 for alpha > 1
/// ("normalized_sup_error"). Fits that cannot be made are reported in notes.
std::vector<RateRow> error_rates(const std::vector<ErrorReport>& errors, std::vector<std::string>* notes = nullptr);

/// Writes errors.csv, rates.csv, statistics.csv, summary.json and, for audit
/// runs, audit.csv. Throws std::runtime_error naming the path on I/O failure.
void write_outputs(const RunRecord& record, const std::filesystem::path& directory);

void write_errors_csv(const std::vector<ErrorReport>& errors, const std::filesystem::path& path);
void write_rates_csv(const std::vector<RateRow>& rates, const std::filesystem::path& path);

/// Reads errors.csv back into reports, one per (nu, alpha, seed) in file order.
std::vector<ErrorReport> read_errors_csv(const std::filesystem::path& path);

}  // namespace spwave
