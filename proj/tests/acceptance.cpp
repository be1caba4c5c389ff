// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.
//
//   spwave_acceptance [--configs DIR] [--out DIR] [--threads N]
//
// Every tolerance below is fixed here; nothing is read from the environment.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spwave/experiment.hpp"

using namespace spwave;
namespace fs = std::filesystem;

namespace {

// 1: closed-form checks
constexpr double kOracleSeconds = 10.0;
// 2: OU law
constexpr std::size_t kOuReplicas = 10000;
constexpr double kOuSigmas = 5.0;
constexpr double kTraceSigmas = 3.0;
constexpr double kTraceFraction = 0.99;
// 3: reconstruction identity
constexpr double kHalvingLow = 1.7, kHalvingHigh = 2.3;
// 4: weak-expansion term slopes
constexpr double kV1Slope = 1.0, kV1Tol = 0.1;
constexpr double kV2Slope = 1.0, kV2Tol = 0.2;
constexpr double kV3Slope = 1.0, kV3Tol = 0.2;
// 5: heat limit, alpha = 0
constexpr double kHeat0Slope = 0.5, kHeat0Tol = 0.15;
// 6: heat limit, alpha = 0.5
constexpr double kHeat05Raw = 1.0, kHeat05RawTol = 0.2;
constexpr double kHeat05Norm = 0.5, kHeat05NormTol = 0.2;
// 7: deterministic wave limit, alpha = 2
constexpr double kWaveNormMin = 0.3, kWaveRawMin = 1.0;
// 8: uniform bounds
constexpr double kSpreadMax = 3.0;
constexpr double kTrendSlopeMin = -0.1;
constexpr double kSaturationSigmas = 3.0;

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  std::printf("%s  criterion %d  %-28s %s  [%.1f s]\n", o.passed ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.passed) ++failures;
}

template <typename F>
void criterion(int id, const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, fmt, args...);
  return buffer;
}

const RateFit& rate(const RunRecord& record, const std::string& name) {
  for (const auto& r : record.rates)
    if (r.experiment == name) return r.fit;
  throw std::runtime_error("no rate row '" + name + "'");
}

std::vector<StatRow> statistic(const RunRecord& record, const std::string& name) {
  std::vector<StatRow> rows;
  for (const auto& s : record.statistics)
    if (s.statistic == name) rows.push_back(s);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.nu > b.nu; });
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

RunRecord run_and_write(const fs::path& config, const fs::path& out, int threads) {
  const auto record = run_experiment(load_config(config), {threads});
  write_outputs(record, out);
  return record;
}

Outcome ou_law(int threads) {
  // (a) one mode, b_1 = 1, nu = 0.1, t = 1.
  const double nu = 0.1, horizon = 1.0;
  const std::size_t steps = 100;
  ModelParams p;
  p.nu = nu;
  p.alpha = 0.5;
  p.horizon = horizon;
  p.steps = steps;
  p.basis = SpectralBasis(1.0, 1);
  p.noise = CovarianceSpectrum::single_mode(1);
  const auto single = ensemble(
      kOuReplicas, 314159,
      [&](std::size_t, std::uint64_t seed) {
        const auto path = sample_path(p.noise, horizon, steps, seed);
        SpectralField v3(p.basis);
        for (std::size_t j = 0; j < steps; ++j) v3 = step_v3(v3, p, path.increments(j), p.dt());
        return std::vector<double>{v3[0]};
      },
      threads);
  std::vector<double> x;
  for (const auto& s : single.samples) x.push_back(s[0]);
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    m2 += (v - mean) * (v - mean);
    m4 += std::pow(v - mean, 4);
  }
  const double var = m2 / (n - 1);
  const double var_stderr = std::sqrt((m4 / n - (m2 / n) * (m2 / n)) / n);
  const double expected = -std::expm1(-2.0 * horizon / nu) / 2.0;
  const double z = (var - expected) / var_stderr;
  const bool law_ok = std::abs(z) <= kOuSigmas;

  // (b) default spectrum, nu grid, every output time: E ||v3||^2 <= tr Q.
  ExperimentConfig c;
  c.modes = 32;
  const auto q = c.spectrum();
  const auto sampling = c.sampling();
  const std::size_t checkpoints = sampling.steps.size();
  const auto bound = ensemble(
      kOuReplicas, 271828,
      [&](std::size_t, std::uint64_t seed) {
        const auto path = sample_path(q, c.horizon, c.steps, seed);
        std::vector<double> out;
        out.reserve(c.nu.size() * checkpoints);
        for (double nu_value : c.nu) {
          const auto params = c.model(nu_value);
          SpectralField v3(params.basis);
          std::size_t next = 0;
          for (std::size_t j = 0; j < c.steps && next < checkpoints; ++j) {
            v3 = step_v3(v3, params, path.increments(j), params.dt());
            if (j + 1 == sampling.steps[next]) {
              out.push_back(inner(v3, v3));
              ++next;
            }
          }
        }
        return out;
      },
      threads);
  const double trace = q.trace();
  std::size_t held = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < bound.mean.size(); ++i) {
    if (bound.mean[i] - kTraceSigmas * bound.stderr_[i] <= trace) ++held;
    worst = std::max(worst, bound.mean[i] / trace);
  }
  const double fraction = static_cast<double>(held) / static_cast<double>(bound.mean.size());
  const bool trace_ok = fraction >= kTraceFraction;
  return {law_ok && trace_ok,
          format("var %.5f vs %.5f (z = %+.2f, |z| <= %.0f); E||v3||^2 <= trQ at %.1f%% of %zu checkpoints "
                 "(>= %.0f%%), max E||v3||^2/trQ %.3f",
                 var, expected, z, kOuSigmas, 100 * fraction, bound.mean.size(), 100 * kTraceFraction, worst)};
}

Outcome reconstruction() {
  ExperimentConfig c;
  c.modes = 16;
  c.alpha = 0.5;
  c.seed = 20240101;
  c.u1 = FieldSpec::named("mode1");
  const double nu = 0.01;
  const std::size_t coarse = 1024, levels = 4, fine = coarse << (levels - 1);
  c.steps = fine;
  const auto master = replica_path(c, 0);
  std::vector<double> worst;
  for (std::size_t steps = coarse; steps <= fine; steps *= 2) {
    auto params = c.model(nu);
    params.steps = steps;
    const auto run = run_split(params, coarsen(master, fine / steps), c.u0.build(c.basis()), c.u1.build(c.basis()),
                               Sampling::every(steps));
    const auto d = reconstruction_defect(run);
    worst.push_back(*std::max_element(d.begin(), d.end()));
  }
  bool ok = true;
  std::string detail = "max defect";
  for (double w : worst) detail += format(" %.3e", w);
  detail += "; ratios";
  for (std::size_t i = 1; i < worst.size(); ++i) {
    const double r = worst[i - 1] / worst[i];
    ok = ok && r >= kHalvingLow && r <= kHalvingHigh;
    detail += format(" %.3f", r);
  }
  return {ok, detail + format(" (in [%.1f, %.1f])", kHalvingLow, kHalvingHigh)};
}

Outcome expansion_terms(const fs::path& configs, const fs::path& out, int threads) {
  const auto record = run_and_write(configs / "split_audit.ini", out / "split_audit", threads);
  const double v1 = rate(record, "v1_term").slope;
  const double v2b = rate(record, "v2_boundary").slope;
  const double v2i = rate(record, "v2_integral").slope;
  const double v3 = rate(record, "v3_residual").slope;
  const bool ok = within(v1, kV1Slope, kV1Tol) && within(v2b, kV2Slope, kV2Tol) && within(v2i, kV2Slope, kV2Tol) &&
                  within(v3, kV3Slope, kV3Tol);
  return {ok, format("slopes v1 %.3f (%.1f +- %.1f), v2 boundary %.3f, v2 integral %.3f (%.1f +- %.1f), "
                     "v3 residual %.3f (%.1f +- %.1f)",
                     v1, kV1Slope, kV1Tol, v2b, v2i, kV2Slope, kV2Tol, v3, kV3Slope, kV3Tol)};
}

Outcome heat_alpha0(const RunRecord& record) {
  const double slope = rate(record, "sup_error").slope;
  const auto means = statistic(record, "sup_error");
  bool monotone = true;
  std::string list;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (i > 0 && !(means[i].mean < means[i - 1].mean)) monotone = false;
    list += format(" %.4g", means[i].mean);
  }
  return {within(slope, kHeat0Slope, kHeat0Tol) && monotone,
          format("slope %.3f (%.2f +- %.2f); mean sup errors nu = 1e-1..1e-4:%s (%s)", slope, kHeat0Slope, kHeat0Tol,
                 list.c_str(), monotone ? "decreasing" : "NOT decreasing")};
}

Outcome heat_alpha05(const fs::path& configs, const fs::path& out, int threads) {
  const auto record = run_and_write(configs / "heat_alpha05.ini", out / "heat_alpha05", threads);
  const double raw = rate(record, "sup_error").slope;
  const double norm = rate(record, "normalized_sup_error").slope;
  return {within(raw, kHeat05Raw, kHeat05RawTol) && within(norm, kHeat05Norm, kHeat05NormTol) && norm > 0.0,
          format("raw slope %.3f (%.1f +- %.1f), normalized slope %.3f (%.1f +- %.1f)", raw, kHeat05Raw,
                 kHeat05RawTol, norm, kHeat05Norm, kHeat05NormTol)};
}

Outcome wave_alpha2(const fs::path& configs, const fs::path& out, int threads) {
  const auto record = run_and_write(configs / "detwave_alpha2.ini", out / "detwave_alpha2", threads);
  const double raw = rate(record, "sup_error").slope;
  const double norm = rate(record, "normalized_sup_error").slope;
  return {norm >= kWaveNormMin && raw > kWaveRawMin,
          format("normalized slope %.3f (>= %.1f), raw slope %.3f (> %.1f)", norm, kWaveNormMin, raw, kWaveRawMin)};
}

// Bounded across the nu grid: spread below kSpreadMax, fitted log-log slope
// not below kTrendSlopeMin, and the last step of the grid statistically flat.
Outcome uniform_bounds(const fs::path& configs, const fs::path& out, int threads) {
  const auto record = run_and_write(configs / "component_scaling.ini", out / "component_scaling", threads);
  bool ok = true;
  std::string detail;
  for (const char* name : {"sup_u_h1", "max_t_mean_v2_hm1"}) {
    const auto rows = statistic(record, name);
    double lo = rows.front().mean, hi = lo;
    for (const auto& r : rows) {
      lo = std::min(lo, r.mean);
      hi = std::max(hi, r.mean);
    }
    const double spread = hi / lo;
    const double slope = rate(record, name).slope;
    const auto& a = rows[rows.size() - 2];
    const auto& b = rows.back();
    const double z = (b.mean - a.mean) / std::hypot(a.stderr_, b.stderr_);
    const bool this_ok = spread < kSpreadMax && slope >= kTrendSlopeMin && z <= kSaturationSigmas;
    ok = ok && this_ok;
    detail += format("%s%s: %.3g..%.3g (ratio %.2f < %.0f), slope %+.3f (>= %.1f), last-step z %+.2f (<= %.0f)",
                     detail.empty() ? "" : "; ", name, lo, hi, spread, kSpreadMax, slope, kTrendSlopeMin, z,
                     kSaturationSigmas);
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string configs = SPWAVE_CONFIG_DIR;
  std::string out = "acceptance_out";
  int threads = std::max(1, omp_get_max_threads());
  app.add_option("--configs", configs, "Directory with the experiment configs");
  app.add_option("--out", out, "Directory for run outputs");
  app.add_option("--threads", threads, "OpenMP threads for ensembles");
  CLI11_PARSE(app, argc, argv);
  const fs::path config_dir(configs), out_dir(out);
  fs::create_directories(out_dir);
  std::printf("threads %d, configs %s, outputs %s\n", threads, config_dir.c_str(), out_dir.c_str());

  criterion(1, "closed-form oracles", [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto checks = run_oracle_suite();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double worst = 0.0;
    std::size_t passed = 0;
    for (const auto& c : checks) {
      worst = std::max(worst, c.error / c.tolerance);
      passed += c.passed;
    }
    return Outcome{all_passed(checks) && seconds < kOracleSeconds,
                   format("%zu/%zu checks pass, worst error/tolerance %.2e, %.2f s (< %.0f s)", passed, checks.size(),
                          worst, seconds, kOracleSeconds)};
  });
  criterion(2, "Ornstein-Uhlenbeck law", [&] { return ou_law(threads); });
  criterion(3, "reconstruction identity", [&] { return reconstruction(); });
  criterion(4, "weak-expansion scaling", [&] { return expansion_terms(config_dir, out_dir, threads); });

  RunRecord heat0;
  criterion(5, "heat limit alpha=0", [&] {
    heat0 = run_and_write(config_dir / "heat_alpha0.ini", out_dir / "heat_alpha0", threads);
    return heat_alpha0(heat0);
  });
  criterion(6, "heat limit alpha=0.5", [&] { return heat_alpha05(config_dir, out_dir, threads); });
  criterion(7, "wave limit alpha=2", [&] { return wave_alpha2(config_dir, out_dir, threads); });
  criterion(8, "uniform bounds", [&] { return uniform_bounds(config_dir, out_dir, threads); });
  criterion(9, "determinism", [&] {
    // Repeat criterion 5 twice: same thread count, then a different one.
    const int other = threads == 1 ? 4 : 1;
    run_and_write(config_dir / "heat_alpha0.ini", out_dir / "heat_alpha0_repeat", threads);
    run_and_write(config_dir / "heat_alpha0.ini", out_dir / "heat_alpha0_other", other);
    const auto first = slurp(out_dir / "heat_alpha0" / "errors.csv");
    const bool same = !first.empty() && first == slurp(out_dir / "heat_alpha0_repeat" / "errors.csv") &&
                      first == slurp(out_dir / "heat_alpha0_other" / "errors.csv");
    return Outcome{same, format("errors.csv (%zu bytes) %s across repeat and %d vs %d threads", first.size(),
                                same ? "byte-identical" : "DIFFERS", threads, other)};
  });

  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
