#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "spwave/errors.hpp"
#include "spwave/experiment.hpp"

using namespace spwave;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(ExperimentKind kind = ExperimentKind::full_vs_heat, double alpha = 0.0) {
  ExperimentConfig c;
  c.kind = kind;
  c.alpha = alpha;
  c.nu = {1e-1, 1e-2, 1e-3};
  c.replicas = 3;
  c.seed = 5;
  c.modes = 8;
  c.steps = 256;
  c.output_count = 8;
  return c;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& path) {
  const auto text = slurp(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("spwave_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Harness, EmptyRecordWritesHeaderOnlyFiles) {
  const auto dir = scratch("empty");
  RunRecord record;
  record.config = small_config();
  write_outputs(record, dir);
  EXPECT_EQ(slurp(dir / "errors.csv"), "nu,alpha,seed,t,l2_error\n");
  EXPECT_EQ(slurp(dir / "rates.csv"), "experiment,alpha,slope,intercept,r2,n_points\n");
  EXPECT_EQ(line_count(dir / "statistics.csv"), 1u);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_FALSE(fs::exists(dir / "audit.csv"));
}

TEST(Harness, ErrorsCsvHasOneRowPerNuReplicaAndOutput) {
  const auto dir = scratch("rows");
  const auto config = small_config();
  const auto record = run_experiment(config);
  write_outputs(record, dir);
  EXPECT_EQ(record.errors.size(), config.nu.size() * config.replicas);
  EXPECT_EQ(line_count(dir / "errors.csv"), 1 + config.nu.size() * config.replicas * config.output_count);
  const auto summary = slurp(dir / "summary.json");
  for (const char* key : {"\"version\"", "\"config_text\"", "\"noise_spectrum\"", "\"replica_seeds\"", "\"rates\"",
                          "\"wall_time_seconds\""})
    EXPECT_NE(summary.find(key), std::string::npos) << key;
}

TEST(Harness, OutputsIndependentOfThreadCount) {
  const auto config = small_config();
  const auto a = scratch("threads1"), b = scratch("threads4");
  write_outputs(run_experiment(config, {1}), a);
  write_outputs(run_experiment(config, {4}), b);
  for (const char* file : {"errors.csv", "rates.csv", "statistics.csv"})
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
}

TEST(Harness, RatesRecomputedFromErrorsFile) {
  const auto dir = scratch("rates");
  const auto record = run_experiment(small_config());
  write_errors_csv(record.errors, dir / "errors.csv");
  const auto reread = read_errors_csv(dir / "errors.csv");
  ASSERT_EQ(reread.size(), record.errors.size());
  for (std::size_t i = 0; i < reread.size(); ++i) {
    EXPECT_EQ(reread[i].seed, record.errors[i].seed);
    EXPECT_EQ(reread[i].errors, record.errors[i].errors);
  }
  write_rates_csv(record.rates, dir / "rates_run.csv");
  write_rates_csv(error_rates(reread), dir / "rates_reread.csv");
  EXPECT_EQ(slurp(dir / "rates_run.csv"), slurp(dir / "rates_reread.csv"));
  ASSERT_EQ(record.rates.size(), 2u);
  EXPECT_EQ(record.rates[0].experiment, "sup_error");
  EXPECT_EQ(record.rates[1].experiment, "normalized_sup_error");
}

TEST(Harness, ConfigTextReproducesRun) {
  const auto config = small_config(ExperimentKind::full_vs_detwave, 2.0);
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  write_outputs(run_experiment(config), a);
  write_outputs(run_experiment(parse_config(to_text(config))), b);
  EXPECT_EQ(slurp(a / "errors.csv"), slurp(b / "errors.csv"));
}

TEST(Harness, ReplicaPathsAreDistinctAndStable) {
  const auto config = small_config();
  const auto p0 = replica_path(config, 0), p1 = replica_path(config, 1);
  EXPECT_NE(p0.seed(), p1.seed());
  const auto again = replica_path(config, 0);
  EXPECT_TRUE(std::equal(p0.data().begin(), p0.data().end(), again.data().begin(), again.data().end()));
  EXPECT_EQ(p0.steps(), config.steps);
}

TEST(Harness, SplitAuditWritesAuditTable) {
  auto config = small_config(ExperimentKind::split_audit, 0.5);
  config.replicas = 2;
  const auto dir = scratch("audit");
  const auto record = run_experiment(config);
  write_outputs(record, dir);
  EXPECT_TRUE(fs::exists(dir / "audit.csv"));
  EXPECT_EQ(record.audits.size(), config.nu.size() * config.replicas);
  EXPECT_FALSE(record.rates.empty());
}

TEST(Harness, BlowUpNamesNuAndSeed) {
  auto config = small_config();
  config.nonlinearity = "polynomial";
  config.polynomial = {0.0, 200.0, 0.0, 0.0};
  try {
    run_experiment(config);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("nu="), std::string::npos) << what;
    EXPECT_NE(what.find("seed="), std::string::npos) << what;
  }
}

TEST(Harness, UnwritableDirectoryReported) {
  RunRecord record;
  record.config = small_config();
  EXPECT_THROW(write_outputs(record, "/proc/spwave_cannot_write"), std::runtime_error);
}
