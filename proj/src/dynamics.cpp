#include "spwave/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "spwave/errors.hpp"

namespace spwave {

namespace {

void check_finite(std::span<const double> coeffs, double t, const char* what) {
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double value = coeffs[k];
    if (!std::isfinite(value) || std::abs(value) > kBlowUpThreshold) {
      std::ostringstream msg;
      msg << "blow-up in " << what << " at t=" << t << ", mode " << (k + 1) << ", value " << value;
      throw BlowUpError(msg.str(), t, k + 1, value);
    }
  }
}

// sinh(r)/r for z = r^2 >= 0, sin(r)/r for z = -r^2 < 0.
double sinc_signed(double z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 6.0 + z * z / 120.0;
  if (z > 0.0) {
    const double r = std::sqrt(z);
    return std::sinh(r) / r;
  }
  const double r = std::sqrt(-z);
  return std::sin(r) / r;
}

double cos_signed(double z) { return z >= 0.0 ? std::cosh(std::sqrt(z)) : std::cos(std::sqrt(-z)); }

class Recorder {
 public:
  Recorder(const Sampling& sampling, std::size_t total_steps, double h) : sampling_(sampling), h_(h) {
    for (std::size_t i = 0; i < sampling.steps.size(); ++i) {
      if (sampling.steps[i] > total_steps) throw ShapeError("sample step beyond the horizon");
      if (i > 0 && sampling.steps[i] <= sampling.steps[i - 1])
        throw ShapeError("sample steps must be strictly increasing");
    }
  }

  bool due(std::size_t n) const { return next_ < sampling_.steps.size() && sampling_.steps[next_] == n; }

  template <typename Fn>
  void record(std::size_t n, Trajectory& traj, Fn&& extra) {
    if (!due(n)) return;
    traj.steps.push_back(n);
    traj.times.push_back(static_cast<double>(n) * h_);
    extra();
    ++next_;
  }

 private:
  const Sampling& sampling_;
  double h_;
  std::size_t next_ = 0;
};

}  // namespace

double ModelParams::sigma() const { return alpha == 0.0 ? 1.0 : std::pow(nu, alpha); }

void ModelParams::validate() const {
  std::vector<std::string> problems;
  if (!(nu > 0.0 && nu <= 1.0)) problems.push_back("experiment.nu: must lie in (0, 1], got " + std::to_string(nu));
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    problems.push_back("experiment.alpha: must be finite and >= 0");
  if (alpha == 1.0)
    problems.push_back(
        "experiment.alpha: alpha = 1 is the boundary case where the O(nu) terms and the noise term balance; "
        "no limit model is defined there and it is deliberately not supported");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) problems.push_back("time.horizon: must be positive");
  if (steps == 0) problems.push_back("time.steps: must be at least 1");
  if (noise.modes() != basis.modes()) problems.push_back("noise: spectrum length must equal basis.modes");
  if (!problems.empty()) throw ConfigError(problems);
}

Sampling Sampling::every(std::size_t total_steps, std::size_t stride) {
  if (stride == 0) throw ShapeError("sampling stride must be positive");
  Sampling s;
  for (std::size_t n = 0; n < total_steps; n += stride) s.steps.push_back(n);
  s.steps.push_back(total_steps);
  return s;
}

Sampling Sampling::at_times(std::span<const double> times, double horizon, std::size_t total_steps) {
  Sampling s;
  for (double t : times) {
    const double position = t / horizon * static_cast<double>(total_steps);
    const double nearest = std::round(position);
    if (t < 0.0 || t > horizon * (1.0 + 1e-12) || std::abs(position - nearest) > 1e-9 * std::max(1.0, position)) {
      std::ostringstream msg;
      msg << "output time " << t << " is not on the integrator grid (T=" << horizon << ", J=" << total_steps << ")";
      throw ShapeError(msg.str());
    }
    s.steps.push_back(static_cast<std::size_t>(nearest));
  }
  std::sort(s.steps.begin(), s.steps.end());
  s.steps.erase(std::unique(s.steps.begin(), s.steps.end()), s.steps.end());
  return s;
}

Sampling Sampling::uniform(std::size_t count, std::size_t total_steps) {
  if (count == 0 || total_steps % count != 0)
    throw ShapeError("output count " + std::to_string(count) + " must divide the step count " +
                     std::to_string(total_steps));
  Sampling s;
  const std::size_t stride = total_steps / count;
  for (std::size_t i = 1; i <= count; ++i) s.steps.push_back(i * stride);
  return s;
}

namespace {

// Taylor series of e^{X} and of (e^{X} - I) X^{-1} for small X = B h; used
// where the closed forms below lose digits to cancellation in 1 - e^{Bh}.
OscillatorPropagator propagator_series(double lambda, double nu, double h) {
  const double x[2][2] = {{0.0, h}, {-lambda * h / nu, -h / nu}};
  double term[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // X^n / n!
  double e[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  double phi[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // sum X^n / (n + 1)!
  for (int n = 1; n < 40; ++n) {
    double next[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) next[i][j] = (term[i][0] * x[0][j] + term[i][1] * x[1][j]) / n;
    double size = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        term[i][j] = next[i][j];
        e[i][j] += term[i][j];
        phi[i][j] += term[i][j] / (n + 1);
        size = std::max(size, std::abs(term[i][j]));
      }
    if (size < 1e-18) break;
  }
  OscillatorPropagator p;
  p.uu = e[0][0];
  p.uv = e[0][1];
  p.vu = e[1][0];
  p.vv = e[1][1];
  p.force_u = h * phi[0][1];
  p.force_v = h * phi[1][1];
  return p;
}

}  // namespace

OscillatorPropagator OscillatorPropagator::make(double lambda, double nu, double h) {
  if (std::max(h, h * (lambda + 1.0) / nu) <= 0.5) return propagator_series(lambda, nu, h);
  // e^{Bh} = a0 I + a1 B. With sigma = -1/(2 nu) and omega^2 = sigma^2 - lambda/nu,
  // a1 = e^{sigma h} sinh(omega h)/omega and a0 = e^{sigma h} cosh(omega h) - sigma a1
  // (trigonometric when omega^2 < 0).
  const double sigma = -0.5 / nu;
  const double disc = 1.0 - 4.0 * nu * lambda;
  const double z = disc * h * h / (4.0 * nu * nu);
  double a0 = 0.0;
  double a1 = 0.0;
  if (z > 1.0) {
    // Real roots well apart: factor out the slow exponential to avoid overflow.
    const double omega = std::sqrt(disc) / (2.0 * nu);
    const double fast = sigma - omega;
    const double slow = (lambda / nu) / fast;
    const double e_slow = std::exp(slow * h);
    a1 = e_slow * (-std::expm1(-2.0 * omega * h)) / (2.0 * omega);
    a0 = e_slow - slow * a1;
  } else {
    const double e = std::exp(sigma * h);
    const double s = sinc_signed(z);
    a1 = e * h * s;
    a0 = e * (cos_signed(z) - sigma * h * s);
  }
  OscillatorPropagator p;
  p.uu = a0;
  p.uv = a1;
  p.vu = -a1 * lambda / nu;
  p.vv = a0 - a1 / nu;
  // int_0^h e^{B tau} d tau applied to (0, 1).
  p.force_v = a1;
  p.force_u = (nu * (1.0 - p.vv) - p.uv) / lambda;
  return p;
}

FullWaveStepper::FullWaveStepper(const ModelParams& params, double h)
    : params_(params),
      h_(h),
      noise_rate_(std::pow(params.nu, params.alpha - 1.0) / h),
      scratch_(params.basis.grid_size()),
      forcing_(params.basis) {
  if (!(h > 0.0)) throw ConfigError("time step must be positive");
  modes_.reserve(params.basis.modes());
  for (double lambda : params.basis.eigenvalues()) modes_.push_back(OscillatorPropagator::make(lambda, params.nu, h));
}

void FullWaveStepper::step(WaveState& state, std::span<const double> dw) {
  apply_nonlinearity(params_.nonlinearity, state.u, scratch_, forcing_);
  step(state, forcing_, dw);
}

void FullWaveStepper::step(WaveState& state, const SpectralField& fu, std::span<const double> dw) {
  const double inv_nu = 1.0 / params_.nu;
  auto u = state.u.coeffs();
  auto v = state.v.coeffs();
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const auto& p = modes_[k];
    double force = fu[k] * inv_nu;
    if (!dw.empty()) force += noise_rate_ * dw[k];
    const double uk = u[k];
    const double vk = v[k];
    u[k] = p.uu * uk + p.uv * vk + p.force_u * force;
    v[k] = p.vu * uk + p.vv * vk + p.force_v * force;
  }
  state.t += h_;
  check_finite(u, state.t, "displacement");
  check_finite(v, state.t, "velocity");
}

HeatStepper::HeatStepper(const ModelParams& params, double h)
    : params_(params),
      h_(h),
      noise_rate_(params.sigma() / h),
      scratch_(params.basis.grid_size()),
      forcing_(params.basis) {
  if (!(h > 0.0)) throw ConfigError("time step must be positive");
  for (double lambda : params.basis.eigenvalues()) {
    decay_.push_back(std::exp(-lambda * h));
    gain_.push_back(-std::expm1(-lambda * h) / lambda);
  }
}

void HeatStepper::step(SpectralField& u, double t, std::span<const double> dw) {
  apply_nonlinearity(params_.nonlinearity, u, scratch_, forcing_);
  auto a = u.coeffs();
  for (std::size_t k = 0; k < a.size(); ++k) {
    double force = forcing_[k];
    if (!dw.empty()) force += noise_rate_ * dw[k];
    a[k] = decay_[k] * a[k] + gain_[k] * force;
  }
  check_finite(a, t + h_, "heat displacement");
}

WaveState step_full_wave(const WaveState& state, const ModelParams& params, std::span<const double> dw, double h) {
  FullWaveStepper stepper(params, h);
  WaveState next = state;
  stepper.step(next, dw);
  return next;
}

SpectralField evolve_v1(const ModelParams& params, const SpectralField& u1, double t) {
  if (t < 0.0) throw std::invalid_argument("evolve_v1: t must be non-negative");
  // exp underflows cleanly to 0 for t >> nu.
  return (params.nu * std::exp(-t / params.nu)) * u1;
}

SpectralField step_v2(const SpectralField& v2, const SpectralField& u, const ModelParams& params, double h) {
  const SpectralField fu = apply_nonlinearity(params.nonlinearity, u);
  const double keep = std::exp(-h / params.nu);
  const double relax = -std::expm1(-h / params.nu);
  SpectralField out(v2.basis());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double g = -params.basis.eigenvalue(k) * u[k] + fu[k];
    out[k] = keep * v2[k] + relax * g;
  }
  return out;
}

SpectralField step_v3(const SpectralField& v3, const ModelParams& params, std::span<const double> dw, double h) {
  if (dw.size() != v3.size()) throw ShapeError("increment count does not match the field");
  const double keep = std::exp(-h / params.nu);
  const double gain = std::sqrt(-std::expm1(-2.0 * h / params.nu) / (2.0 * h));
  SpectralField out(v3.basis());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = keep * v3[k] + gain * dw[k];
  return out;
}

void check_path(const ModelParams& params, const NoisePath& path) {
  if (path.steps() != params.steps)
    throw ShapeError("noise path has " + std::to_string(path.steps()) + " steps, model expects " +
                     std::to_string(params.steps) + " (use coarsen to align)");
  if (std::abs(path.horizon() - params.horizon) > 1e-12 * params.horizon)
    throw ShapeError("noise path horizon differs from the model horizon");
  if (path.modes() != params.basis.modes()) throw ShapeError("noise path mode count differs from the basis");
}

Trajectory simulate_full(const ModelParams& params, const NoisePath& noise, const SpectralField& u0,
                         const SpectralField& u1, const Sampling& sampling, IncrementAudit* audit) {
  params.validate();
  check_path(params, noise);
  const double h = params.dt();
  FullWaveStepper stepper(params, h);
  Recorder recorder(sampling, params.steps, h);
  Trajectory traj;
  WaveState state{u0, u1, 0.0};
  for (std::size_t n = 0;; ++n) {
    recorder.record(n, traj, [&] {
      traj.u.push_back(state.u);
      traj.v.push_back(state.v);
    });
    if (n == params.steps) break;
    const auto dw = noise.increments(n);
    if (audit) audit->consume(dw);
    stepper.step(state, dw);
  }
  return traj;
}

Trajectory simulate_heat(const ModelParams& params, const NoisePath& noise, const SpectralField& u0,
                         const Sampling& sampling, IncrementAudit* audit) {
  params.validate();
  check_path(params, noise);
  const double h = params.dt();
  HeatStepper stepper(params, h);
  Recorder recorder(sampling, params.steps, h);
  Trajectory traj;
  SpectralField u = u0;
  for (std::size_t n = 0;; ++n) {
    recorder.record(n, traj, [&] { traj.u.push_back(u); });
    if (n == params.steps) break;
    const auto dw = noise.increments(n);
    if (audit) audit->consume(dw);
    stepper.step(u, static_cast<double>(n) * h, dw);
  }
  return traj;
}

Trajectory simulate_det_wave(const ModelParams& params, const SpectralField& u0, const SpectralField& u1,
                             const Sampling& sampling) {
  params.validate();
  const double h = params.dt();
  FullWaveStepper stepper(params, h);
  Recorder recorder(sampling, params.steps, h);
  Trajectory traj;
  WaveState state{u0, u1, 0.0};
  for (std::size_t n = 0;; ++n) {
    recorder.record(n, traj, [&] {
      traj.u.push_back(state.u);
      traj.v.push_back(state.v);
    });
    if (n == params.steps) break;
    stepper.step(state, {});
  }
  return traj;
}

SplitRun run_split(const ModelParams& params, const NoisePath& noise, const SpectralField& u0,
                   const SpectralField& u1, const Sampling& sampling) {
  params.validate();
  check_path(params, noise);
  const double h = params.dt();
  const double nu = params.nu;
  const double keep = std::exp(-h / nu);
  const double relax = -std::expm1(-h / nu);
  const double ou_gain = std::sqrt(-std::expm1(-2.0 * h / nu) / (2.0 * h));
  const double sqrt_nu = std::sqrt(nu);
  const double v3_scale = std::pow(nu, params.alpha - 0.5);
  const auto lambda = params.basis.eigenvalues();
  const std::size_t n_modes = params.basis.modes();

  FullWaveStepper stepper(params, h);
  Recorder recorder(sampling, params.steps, h);
  std::vector<double> scratch(params.basis.grid_size());

  SplitRun run{params, {}, {}, {}, {}, {}, false};
  run.every_step = sampling.steps.size() == params.steps + 1;

  WaveState state{u0, u1, 0.0};
  SpectralField v2(params.basis);
  SpectralField v3(params.basis);
  SpectralField u_split = u0;
  SpectralField fu(params.basis);

  for (std::size_t n = 0;; ++n) {
    const double t = static_cast<double>(n) * h;
    recorder.record(n, run.full, [&] {
      run.full.u.push_back(state.u);
      run.full.v.push_back(state.v);
      run.v1.push_back(evolve_v1(params, u1, t));
      run.v2.push_back(v2);
      run.v3.push_back(v3);
      run.u_split.push_back(u_split);
    });
    if (n == params.steps) break;

    const auto dw = noise.increments(n);
    apply_nonlinearity(params.nonlinearity, state.u, scratch, fu);

    // Exact step integrals of each component under the frozen forcing.
    const double v1_integral = nu * nu * std::exp(-t / nu) * relax;  // per unit u1
    const double v2_keep_integral = nu * relax;
    const double v2_relax_integral = h - nu * relax;
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double g = -lambda[k] * state.u[k] + fu[k];
      const double v3_next = keep * v3[k] + ou_gain * dw[k];
      const double i1 = v1_integral * u1[k];
      const double i2 = v2_keep_integral * v2[k] + v2_relax_integral * g;
      const double i3 = nu * (v3[k] - v3_next) + sqrt_nu * dw[k];
      u_split[k] += i1 / nu + i2 + v3_scale * i3;
      v2[k] = keep * v2[k] + relax * g;
      v3[k] = v3_next;
    }
    stepper.step(state, fu, dw);
    check_finite(v2.coeffs(), state.t, "mean velocity part");
  }
  return run;
}

std::vector<double> reconstruction_defect(const SplitRun& run) {
  const double nu = run.params.nu;
  const double v3_scale = std::pow(nu, run.params.alpha + 0.5);
  std::vector<double> out;
  out.reserve(run.full.size());
  for (std::size_t i = 0; i < run.full.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < run.v2[i].size(); ++k) {
      const double d = nu * run.full.v[i][k] - run.v1[i][k] - nu * run.v2[i][k] - v3_scale * run.v3[i][k];
      acc += d * d;
    }
    out.push_back(std::sqrt(acc));
  }
  return out;
}

double energy(const WaveState& state, const ModelParams& params) {
  const double kinetic = 0.5 * params.nu * state.v.norm(0.0) * state.v.norm(0.0);
  const double elastic = 0.5 * state.u.norm(1.0) * state.u.norm(1.0);
  return kinetic + elastic - integrate_antiderivative(params.nonlinearity, state.u);
}

}  // namespace spwave
