#include "spwave/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include "spwave/dynamics.hpp"

namespace spwave {

double damped_mode_exact(double lambda, double nu, double u0, double v0, double t) {
  using cd = std::complex<double>;
  const cd s = std::sqrt(cd(1.0 - 4.0 * nu * lambda, 0.0));
  // Large root first, the small one from the product of roots (lambda / nu),
  // which avoids cancellation when nu lambda is small.
  const cd m1 = (-1.0 - s) / (2.0 * nu);
  const cd m2 = lambda / (nu * m1);
  const cd c2 = (v0 - m1 * u0) / (m2 - m1);
  const cd c1 = u0 - c2;
  return (c1 * std::exp(m1 * t) + c2 * std::exp(m2 * t)).real();
}

namespace {

std::string label(const char* fmt, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

OracleCheck make_check(std::string name, double error, double tolerance, const char* measure) {
  return {std::move(name), error, tolerance, measure, error <= tolerance};
}

ModelParams linear_params(double nu, std::size_t modes, double horizon, std::size_t steps) {
  ModelParams p;
  p.nu = nu;
  p.alpha = 0.0;
  p.horizon = horizon;
  p.steps = steps;
  p.basis = SpectralBasis(1.0, modes);
  p.nonlinearity = Nonlinearity::zero();
  p.noise = CovarianceSpectrum::zero(modes);
  return p;
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite() {
  std::vector<OracleCheck> checks;

  // Transient component against nu u1 e^{-t/nu}.
  for (double nu : {1.0, 0.1, 0.01}) {
    ModelParams p = linear_params(nu, 4, 1.0, 1);
    SpectralField u1(p.basis, {1.0, 0.5, 0.0, -0.25});
    for (double factor : {0.0, 1.0, 10.0}) {
      const double t = factor * nu;
      const SpectralField v1 = evolve_v1(p, u1, t);
      double diff = 0.0, ref = 0.0;
      for (std::size_t k = 0; k < u1.size(); ++k) {
        const double expected = nu * u1[k] * std::exp(-t / nu);
        diff = std::max(diff, std::abs(v1[k] - expected));
        ref = std::max(ref, std::abs(expected));
      }
      checks.push_back(make_check(label("v1 closed form nu=%g t=%g", nu, t), diff / ref, 1e-12, "relative"));
    }
  }

  // Linear noiseless wave, one active mode, against the characteristic roots.
  for (double nu : {1e-1, 1e-3, 1e-6}) {
    for (std::size_t k : {std::size_t{1}, std::size_t{10}}) {
      const std::size_t steps = 1000;
      ModelParams p = linear_params(nu, 10, 1.0, steps);
      const SpectralField u0 = SpectralField::unit(p.basis, k);
      const SpectralField u1 = 0.5 * SpectralField::unit(p.basis, k);
      const Trajectory traj = simulate_det_wave(p, u0, u1, Sampling::every(steps));
      const double lambda = p.basis.eigenvalue(k - 1);
      double err = 0.0;
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const double exact = damped_mode_exact(lambda, nu, 1.0, 0.5, traj.times[i]);
        err = std::max(err, std::abs(traj.u[i][k - 1] - exact));
        for (std::size_t j = 0; j < traj.u[i].size(); ++j)
          if (j != k - 1) err = std::max(err, std::abs(traj.u[i][j]));
      }
      checks.push_back(make_check(label("linear wave mode nu=%g lambda=%.6g", nu, lambda), err, 1e-10, "absolute"));
    }
  }

  // Heat mode against e^{-lambda t}; the horizon keeps e^{-lambda T} normal.
  for (std::size_t k : {std::size_t{1}, std::size_t{10}}) {
    const double horizon = k == 1 ? 1.0 : 0.05;
    const std::size_t steps = 2048;
    ModelParams p = linear_params(0.5, 10, horizon, steps);
    const NoisePath silent = sample_path(p.noise, horizon, steps, 0);
    const Trajectory traj = simulate_heat(p, silent, SpectralField::unit(p.basis, k), Sampling::uniform(64, steps));
    const double lambda = p.basis.eigenvalue(k - 1);
    double err = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double exact = std::exp(-lambda * traj.times[i]);
      err = std::max(err, std::abs(traj.u[i][k - 1] - exact) / exact);
    }
    checks.push_back(make_check(label("heat mode lambda=%.6g T=%g", lambda, horizon), err, 1e-12, "relative"));
  }
  return checks;
}

bool all_passed(const std::vector<OracleCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

}  // namespace spwave
