#include "spwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "spwave/errors.hpp"

namespace spwave {

TemporalFactor TemporalFactor::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  return TemporalFactor(Kind::polynomial, std::move(coefficients));
}

TemporalFactor TemporalFactor::trigonometric(double offset, double cos_amplitude, double sin_amplitude,
                                             double frequency) {
  return TemporalFactor(Kind::trigonometric, {offset, cos_amplitude, sin_amplitude, frequency});
}

double TemporalFactor::value(double t) const noexcept {
  if (kind_ == Kind::trigonometric) return c_[0] + c_[1] * std::cos(c_[3] * t) + c_[2] * std::sin(c_[3] * t);
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double TemporalFactor::derivative(double t) const noexcept {
  if (kind_ == Kind::trigonometric) return c_[3] * (-c_[1] * std::sin(c_[3] * t) + c_[2] * std::cos(c_[3] * t));
  double acc = 0.0;
  for (std::size_t i = c_.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * c_[i];
  return acc;
}

SpectralField TestFunction::at(double t) const { return factor.value(t) * profile; }

SpectralField TestFunction::time_derivative(double t) const { return factor.derivative(t) * profile; }

SpectralField TestFunction::laplacian(double t) const {
  SpectralField out = at(t);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= -out.basis().eigenvalue(k);
  return out;
}

namespace {

std::size_t find_sample(const Trajectory& traj, double t) {
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (std::abs(traj.times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  }
  std::ostringstream msg;
  msg << "time " << t << " is not a recorded sample of the trajectory";
  throw ShapeError(msg.str());
}

}  // namespace

double weak_pairing(const Trajectory& traj, const TestFunction& phi, double t) {
  const std::size_t i = find_sample(traj, t);
  return inner(traj.u[i], phi.at(traj.times[i]));
}

std::vector<double> AuditTable::v3_residual() const {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v3_term[i] - ito[i];
  return out;
}

AuditTable expansion_audit(const SplitRun& run, const NoisePath& noise, const TestFunction& phi,
                           const Sampling& audit_times) {
  if (!run.every_step)
    throw std::invalid_argument("expansion_audit: missing split components; record the run at every step");
  const ModelParams& params = run.params;
  check_path(params, noise);
  if (phi.profile.size() != params.basis.modes()) throw ShapeError("test function and basis mode counts differ");

  const double nu = params.nu;
  const double h = params.dt();
  const double relax = -std::expm1(-h / nu);
  const double sqrt_nu = std::sqrt(nu);
  const double v3_scale = std::pow(nu, params.alpha - 0.5);
  const double sigma = params.sigma();
  const std::size_t n_modes = params.basis.modes();
  const SpectralField& u1 = run.full.v.front();

  for (std::size_t s : audit_times.steps)
    if (s > params.steps) throw ShapeError("audit time beyond the horizon");

  AuditTable table;
  const SpectralField phi0 = phi.at(0.0);
  const double pairing0 = inner(run.full.u.front(), phi0);
  std::vector<double> scratch(params.basis.grid_size());
  SpectralField fu(params.basis);

  // Running sums over completed steps.
  double lhs_integrals = 0.0;  // sum h <u_n, phi_t + Lap phi> + h <f(u_n), phi>
  double r1 = 0.0, r2b = 0.0, r3 = 0.0, ito = 0.0;

  std::size_t next = 0;
  for (std::size_t n = 0;; ++n) {
    const double t = static_cast<double>(n) * h;
    while (next < audit_times.steps.size() && audit_times.steps[next] == n) {
      const SpectralField phi_t = phi.at(t);
      table.times.push_back(t);
      const double lhs = inner(run.full.u[n], phi_t) - pairing0 - lhs_integrals;
      const double r2a = -nu * inner(run.v2[n], phi_t);
      table.lhs.push_back(lhs);
      table.v1_term.push_back(r1);
      table.v2_boundary.push_back(r2a);
      table.v2_integral.push_back(r2b);
      table.v3_term.push_back(r3);
      table.ito.push_back(ito);
      table.defect.push_back(lhs - (r1 + r2a + r2b + r3));
      ++next;
    }
    if (n == params.steps) break;

    const SpectralField phi_n = phi.at(t);
    const SpectralField dphi_n = phi.time_derivative(t);
    const SpectralField lap_n = phi.laplacian(t);
    const auto& u = run.full.u[n];
    apply_nonlinearity(params.nonlinearity, u, scratch, fu);
    lhs_integrals += h * (inner(u, dphi_n) + inner(u, lap_n) + inner(fu, phi_n));

    const double v1_integral = nu * nu * std::exp(-t / nu) * relax;
    const auto dw = noise.increments(n);
    double i1 = 0.0, i3 = 0.0, w = 0.0;
    for (std::size_t k = 0; k < n_modes; ++k) {
      i1 += v1_integral * u1[k] * phi_n[k];
      i3 += (nu * (run.v3[n][k] - run.v3[n + 1][k]) + sqrt_nu * dw[k]) * phi_n[k];
      w += phi_n[k] * dw[k];
    }
    r1 += i1 / nu;
    r2b += nu * h * inner(run.v2[n], dphi_n);
    r3 += v3_scale * i3;
    ito += sigma * w;
  }
  return table;
}

ErrorReport sup_error(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw ShapeError("trajectories have different sample counts");
  ErrorReport report;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.steps[i] != b.steps[i] || a.times[i] != b.times[i])
      throw ShapeError("trajectories are recorded on different time grids");
    const double e = (a.u[i] - b.u[i]).norm(0.0);
    report.times.push_back(a.times[i]);
    report.errors.push_back(e);
    report.sup = std::max(report.sup, e);
  }
  return report;
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
  std::set<double> distinct;
  for (const auto& [nu, err] : points) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw RateFitError("rate_fit: nu values must be positive");
    if (!(err > 0.0) || !std::isfinite(err))
      throw RateFitError("rate_fit: error is zero or non-finite (below noise floor)");
    distinct.insert(nu);
  }
  if (distinct.size() < 3) throw RateFitError("rate_fit: need at least three distinct nu values");

  RateFit fit;
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [nu, err] : points) {
    fit.nu.push_back(nu);
    fit.error.push_back(err);
    mx += std::log(nu);
    my += std::log(err);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [nu, err] : points) {
    const double dx = std::log(nu) - mx;
    const double dy = std::log(err) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

EnsembleStats summarize(std::vector<std::vector<double>> samples) {
  EnsembleStats stats;
  stats.replicas = samples.size();
  if (samples.empty()) return stats;
  const std::size_t width = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != width) throw ShapeError("replicas returned statistic vectors of different lengths");
  const double m = static_cast<double>(samples.size());
  stats.mean.assign(width, 0.0);
  stats.stderr_.assign(width, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < width; ++i) stats.mean[i] += s[i];
  for (double& v : stats.mean) v /= m;
  if (samples.size() > 1) {
    for (const auto& s : samples)
      for (std::size_t i = 0; i < width; ++i) {
        const double d = s[i] - stats.mean[i];
        stats.stderr_[i] += d * d;
      }
    for (double& v : stats.stderr_) v = std::sqrt(v / (m - 1.0) / m);
  }
  stats.samples = std::move(samples);
  return stats;
}

EnsembleStats ensemble_serial(std::size_t replicas, std::uint64_t base_seed, const ReplicaFn& replica) {
  std::vector<std::vector<double>> samples;
  samples.reserve(replicas);
  for (std::size_t r = 0; r < replicas; ++r) samples.push_back(replica(r, rng::replica_seed(base_seed, r)));
  return summarize(std::move(samples));
}

EnsembleStats ensemble(std::size_t replicas, std::uint64_t base_seed, const ReplicaFn& replica, int threads) {
  if (threads <= 1 || replicas <= 1) return ensemble_serial(replicas, base_seed, replica);
  std::vector<std::vector<double>> samples(replicas);
  std::vector<std::exception_ptr> failures(replicas);
  const auto count = static_cast<std::ptrdiff_t>(replicas);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    try {
      const auto idx = static_cast<std::size_t>(r);
      samples[idx] = replica(idx, rng::replica_seed(base_seed, idx));
    } catch (...) {
      failures[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);
  return summarize(std::move(samples));
}

}  // namespace spwave
