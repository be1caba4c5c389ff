#include "spwave/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "spwave/errors.hpp"

namespace spwave {

namespace {

struct ReplicaResult {
  ErrorReport report;
  std::vector<double> stats;
  AuditTable audit;
};

double sup_abs(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

const std::vector<std::string> kAuditStatistics{"v1_term",        "v2_boundary", "v2_integral",         "v3_residual",
                                                "ito_difference", "weak_defect", "reconstruction_defect"};
const std::vector<std::string> kAuditRates{"v1_term", "v2_boundary", "v2_integral", "v3_residual", "ito_difference"};

ReplicaResult run_replica(const ExperimentConfig& config, double nu, std::size_t replica) {
  const ModelParams params = config.model(nu);
  const SpectralBasis& basis = params.basis;
  const SpectralField u0 = config.u0.build(basis);
  const SpectralField u1 = config.u1.build(basis);
  const Sampling sampling = config.sampling();
  const NoisePath path = replica_path(config, replica);

  ReplicaResult result;
  switch (config.kind) {
    case ExperimentKind::full_vs_heat:
    case ExperimentKind::full_vs_detwave: {
      const Trajectory full = simulate_full(params, path, u0, u1, sampling);
      const Trajectory limit = config.kind == ExperimentKind::full_vs_heat
                                   ? simulate_heat(params, path, u0, sampling)
                                   : simulate_det_wave(params, u0, u1, sampling);
      result.report = sup_error(full, limit);
      result.stats = {result.report.sup};
      break;
    }
    case ExperimentKind::split_audit: {
      const SplitRun run = run_split(params, path, u0, u1, Sampling::every(params.steps));
      result.audit = expansion_audit(run, path, config.test_function(), sampling);
      const double scale = std::pow(nu, -config.alpha);
      std::vector<double> ito_difference = result.audit.v3_residual();
      for (double& v : ito_difference) v *= scale;
      const auto defects = reconstruction_defect(run);
      for (std::size_t s : sampling.steps) {
        result.report.times.push_back(run.full.times[s]);
        const double e = (run.full.u[s] - run.u_split[s]).norm(0.0);
        result.report.errors.push_back(e);
        result.report.sup = std::max(result.report.sup, e);
      }
      result.stats = {sup_abs(result.audit.v1_term),     sup_abs(result.audit.v2_boundary),
                      sup_abs(result.audit.v2_integral), sup_abs(result.audit.v3_residual()),
                      sup_abs(ito_difference),           sup_abs(result.audit.defect),
                      sup_abs(defects)};
      break;
    }
    case ExperimentKind::component_scaling: {
      const SplitRun run = run_split(params, path, u0, u1, sampling);
      double sup_h1 = 0.0;
      for (const auto& u : run.full.u) sup_h1 = std::max(sup_h1, u.norm(1.0));
      result.stats.push_back(sup_h1);
      for (const auto& v2 : run.v2) result.stats.push_back(v2.norm(-1.0));
      for (const auto& v3 : run.v3) result.stats.push_back(v3.norm(0.0) * v3.norm(0.0));
      break;
    }
    case ExperimentKind::oracle_suite:
      break;
  }
  result.report.nu = nu;
  result.report.alpha = config.alpha;
  result.report.seed = path.seed();
  return result;
}

void add_rate(RunRecord& record, const std::string& name, const std::vector<std::pair<double, double>>& points) {
  try {
    record.rates.push_back({name, record.config.alpha, rate_fit(points)});
  } catch (const RateFitError& e) {
    record.notes.push_back(name + ": no rate fitted: " + e.what());
  }
}

// Per-nu summaries and rate fits for the audit and component experiments.
void reduce_statistics(RunRecord& record, const std::vector<ReplicaResult>& results) {
  const ExperimentConfig& config = record.config;
  const std::size_t m = config.replicas;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (std::size_t i = 0; i < config.nu.size(); ++i) {
    const double nu = config.nu[i];
    std::vector<std::vector<double>> samples;
    for (std::size_t r = 0; r < m; ++r) samples.push_back(results[i * m + r].stats);
    const EnsembleStats stats = summarize(std::move(samples));

    if (config.kind == ExperimentKind::split_audit) {
      for (std::size_t s = 0; s < kAuditStatistics.size(); ++s) {
        record.statistics.push_back({nu, kAuditStatistics[s], stats.mean[s], stats.stderr_[s]});
        series[kAuditStatistics[s]].push_back({nu, stats.mean[s]});
      }
    } else if (config.kind == ExperimentKind::component_scaling) {
      const std::size_t n_times = (stats.mean.size() - 1) / 2;
      const double trace = config.spectrum().trace();
      std::size_t v2_at = 1, v3_at = 1 + n_times, exceed = 0;
      for (std::size_t t = 0; t < n_times; ++t) {
        if (stats.mean[1 + t] > stats.mean[v2_at]) v2_at = 1 + t;
        if (stats.mean[1 + n_times + t] > stats.mean[v3_at]) v3_at = 1 + n_times + t;
        const std::size_t j = 1 + n_times + t;
        if (stats.mean[j] - 3.0 * stats.stderr_[j] > trace) ++exceed;
      }
      record.statistics.push_back({nu, "sup_u_h1", stats.mean[0], stats.stderr_[0]});
      record.statistics.push_back({nu, "max_t_mean_v2_hm1", stats.mean[v2_at], stats.stderr_[v2_at]});
      record.statistics.push_back({nu, "max_t_mean_v3_l2sq", stats.mean[v3_at], stats.stderr_[v3_at]});
      record.statistics.push_back({nu, "trace_q", trace, 0.0});
      record.statistics.push_back(
          {nu, "v3_bound_exceedance_fraction",
           n_times == 0 ? 0.0 : static_cast<double>(exceed) / static_cast<double>(n_times), 0.0});
      series["sup_u_h1"].push_back({nu, stats.mean[0]});
      series["max_t_mean_v2_hm1"].push_back({nu, stats.mean[v2_at]});
      series["max_t_mean_v3_l2sq"].push_back({nu, stats.mean[v3_at]});
    } else {
      record.statistics.push_back({nu, "sup_error", stats.mean[0], stats.stderr_[0]});
    }
  }
  if (config.kind == ExperimentKind::split_audit) {
    for (const auto& name : kAuditRates) add_rate(record, name, series[name]);
  } else if (config.kind == ExperimentKind::component_scaling) {
    for (const char* name : {"sup_u_h1", "max_t_mean_v2_hm1", "max_t_mean_v3_l2sq"}) add_rate(record, name, series[name]);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  return cells;
}

template <typename T>
T parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  T value{};
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty())
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": malformed value '" + cell + "'");
  return value;
}

}  // namespace

NoisePath replica_path(const ExperimentConfig& config, std::size_t replica) {
  return sample_path(config.spectrum(), config.horizon, config.steps, rng::replica_seed(config.seed, replica));
}

std::vector<RateRow> error_rates(const std::vector<ErrorReport>& errors, std::vector<std::string>* notes) {
  // alpha -> nu -> (sum of sup errors, replica count), in first-seen order.
  std::vector<double> alphas;
  std::map<double, std::vector<double>> nus;
  std::map<std::pair<double, double>, std::pair<double, std::size_t>> sums;
  for (const auto& report : errors) {
    if (std::find(alphas.begin(), alphas.end(), report.alpha) == alphas.end()) alphas.push_back(report.alpha);
    auto& list = nus[report.alpha];
    if (std::find(list.begin(), list.end(), report.nu) == list.end()) list.push_back(report.nu);
    auto& acc = sums[{report.alpha, report.nu}];
    acc.first += report.sup;
    acc.second += 1;
  }
  std::vector<RateRow> rows;
  for (double alpha : alphas) {
    std::vector<std::pair<double, double>> raw, normalized;
    const double exponent = alpha < 1.0 ? alpha : 1.0;
    for (double nu : nus[alpha]) {
      const auto& acc = sums[{alpha, nu}];
      const double mean = acc.first / static_cast<double>(acc.second);
      raw.push_back({nu, mean});
      normalized.push_back({nu, mean * std::pow(nu, -exponent)});
    }
    for (const auto& [name, points] : {std::pair{"sup_error", &raw}, std::pair{"normalized_sup_error", &normalized}}) {
      try {
        rows.push_back({name, alpha, rate_fit(*points)});
      } catch (const RateFitError& e) {
        if (notes) notes->push_back(std::string(name) + " (alpha " + fmt(alpha) + "): no rate fitted: " + e.what());
      }
    }
  }
  return rows;
}

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.config = config;

  if (config.kind == ExperimentKind::oracle_suite) {
    record.oracle = run_oracle_suite();
  } else {
    const std::size_t m = config.replicas;
    const std::size_t tasks = config.nu.size() * m;
    std::vector<ReplicaResult> results(tasks);
    std::vector<std::exception_ptr> failures(tasks);
    const auto count = static_cast<std::ptrdiff_t>(tasks);
    const int threads = std::max(1, options.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const double nu = config.nu[idx / m];
      const std::size_t replica = idx % m;
      try {
        results[idx] = run_replica(config, nu, replica);
      } catch (const BlowUpError& e) {
        std::ostringstream msg;
        msg << "nu=" << nu << " seed=" << rng::replica_seed(config.seed, replica) << ": " << e.what();
        failures[idx] = std::make_exception_ptr(BlowUpError(msg.str(), e.time(), e.mode(), e.value()));
      } catch (...) {
        failures[idx] = std::current_exception();
      }
    }
    for (const auto& failure : failures)
      if (failure) std::rethrow_exception(failure);

    if (config.kind != ExperimentKind::component_scaling)
      for (const auto& r : results) record.errors.push_back(r.report);
    if (config.kind == ExperimentKind::split_audit)
      for (const auto& r : results) record.audits.push_back({r.report.nu, r.report.seed, r.audit});
    reduce_statistics(record, results);
    if (config.kind == ExperimentKind::full_vs_heat || config.kind == ExperimentKind::full_vs_detwave)
      record.rates = error_rates(record.errors, &record.notes);
  }
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

void write_errors_csv(const std::vector<ErrorReport>& errors, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "nu,alpha,seed,t,l2_error\n";
  for (const auto& r : errors)
    for (std::size_t i = 0; i < r.times.size(); ++i)
      out << fmt(r.nu) << ',' << fmt(r.alpha) << ',' << r.seed << ',' << fmt(r.times[i]) << ',' << fmt(r.errors[i])
          << '\n';
  finish(out, path);
}

void write_rates_csv(const std::vector<RateRow>& rates, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "experiment,alpha,slope,intercept,r2,n_points\n";
  for (const auto& r : rates)
    out << r.experiment << ',' << fmt(r.alpha) << ',' << fmt(r.fit.slope) << ',' << fmt(r.fit.intercept) << ','
        << fmt(r.fit.r2) << ',' << r.fit.nu.size() << '\n';
  finish(out, path);
}

std::vector<ErrorReport> read_errors_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != "nu,alpha,seed,t,l2_error")
    throw std::runtime_error(path.string() + ": expected header nu,alpha,seed,t,l2_error");
  std::vector<ErrorReport> reports;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw std::runtime_error(path.string() + ":" + std::to_string(number) + ": expected 5 columns");
    const double nu = parse_cell<double>(cells[0], path, number);
    const double alpha = parse_cell<double>(cells[1], path, number);
    const auto seed = parse_cell<std::uint64_t>(cells[2], path, number);
    const double t = parse_cell<double>(cells[3], path, number);
    const double e = parse_cell<double>(cells[4], path, number);
    if (reports.empty() || reports.back().nu != nu || reports.back().alpha != alpha || reports.back().seed != seed) {
      reports.emplace_back();
      reports.back().nu = nu;
      reports.back().alpha = alpha;
      reports.back().seed = seed;
    }
    auto& r = reports.back();
    r.times.push_back(t);
    r.errors.push_back(e);
    r.sup = std::max(r.sup, e);
  }
  return reports;
}

void write_outputs(const RunRecord& record, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error(directory.string() + ": cannot create directory: " + ec.message());

  write_errors_csv(record.errors, directory / "errors.csv");
  write_rates_csv(record.rates, directory / "rates.csv");

  {
    const auto path = directory / "statistics.csv";
    auto out = open_output(path);
    out << "nu,statistic,mean,stderr\n";
    for (const auto& s : record.statistics)
      out << fmt(s.nu) << ',' << s.statistic << ',' << fmt(s.mean) << ',' << fmt(s.stderr_) << '\n';
    finish(out, path);
  }

  if (!record.audits.empty()) {
    const auto path = directory / "audit.csv";
    auto out = open_output(path);
    out << "nu,seed,t,lhs,v1_term,v2_boundary,v2_integral,v3_term,ito,defect\n";
    for (const auto& a : record.audits) {
      const auto& tab = a.table;
      for (std::size_t i = 0; i < tab.times.size(); ++i)
        out << fmt(a.nu) << ',' << a.seed << ',' << fmt(tab.times[i]) << ',' << fmt(tab.lhs[i]) << ','
            << fmt(tab.v1_term[i]) << ',' << fmt(tab.v2_boundary[i]) << ',' << fmt(tab.v2_integral[i]) << ','
            << fmt(tab.v3_term[i]) << ',' << fmt(tab.ito[i]) << ',' << fmt(tab.defect[i]) << '\n';
    }
    finish(out, path);
  }

  using nlohmann::ordered_json;
  const ExperimentConfig& c = record.config;
  ordered_json summary;
  summary["version"] = record.version;
  summary["experiment"] = to_string(c.kind);
  summary["config_text"] = to_text(c);
  {
    const CovarianceSpectrum q = c.spectrum();
    ordered_json noise;
    noise["form"] = c.noise_coefficients.empty() ? "power_law" : "explicit";
    if (c.noise_coefficients.empty()) noise["exponent"] = c.noise_exponent;
    noise["scale"] = c.noise_scale;
    noise["trace"] = q.trace();
    noise["coefficients"] = std::vector<double>(q.values().begin(), q.values().end());
    summary["noise_spectrum"] = noise;
  }
  summary["replica_seeds"] = ordered_json::array();
  for (std::size_t r = 0; r < c.replicas && c.kind != ExperimentKind::oracle_suite; ++r)
    summary["replica_seeds"].push_back(rng::replica_seed(c.seed, r));
  summary["rates"] = ordered_json::array();
  for (const auto& r : record.rates)
    summary["rates"].push_back({{"experiment", r.experiment},
                                {"alpha", r.alpha},
                                {"slope", r.fit.slope},
                                {"intercept", r.fit.intercept},
                                {"r2", r.fit.r2},
                                {"nu", r.fit.nu},
                                {"error", r.fit.error}});
  summary["statistics"] = ordered_json::array();
  for (const auto& s : record.statistics)
    summary["statistics"].push_back(
        {{"nu", s.nu}, {"statistic", s.statistic}, {"mean", s.mean}, {"stderr", s.stderr_}});
  summary["oracle"] = ordered_json::array();
  for (const auto& o : record.oracle)
    summary["oracle"].push_back({{"name", o.name},
                                 {"error", o.error},
                                 {"tolerance", o.tolerance},
                                 {"measure", o.measure},
                                 {"passed", o.passed}});
  summary["notes"] = record.notes;
  summary["wall_time_seconds"] = record.wall_seconds;

  const auto path = directory / "summary.json";
  auto out = open_output(path);
  out << summary.dump(2) << '\n';
  finish(out, path);
}

}  // namespace spwave
