#pragma once

// Time integration of the damped stochastic wave system
//
//   u_t = v,   nu v_t = -v - A u + f(u) + nu^alpha dW/dt,
//
// of its two limit models, and of the split velocity
//
//   nu v = v1 + nu v2 + nu^(alpha + 1/2) v3,
//   v1' = -v1 / nu,                     v1(0) = nu u1,
//   v2' = -(v2 - (-A u + f(u))) / nu,   v2(0) = 0,
//   v3' = -v3 / nu + nu^(-1/2) dW/dt,   v3(0) = 0.
//
// Every scheme is exponential in the mode-diagonal linear part, so the step
// size does not need to resolve the 1/nu time scale. The nonlinearity and the
// noise rate dW/h are frozen over a step (first order).

#include <cstddef>
#include <span>
#include <vector>

#include "spwave/noise.hpp"
#include "spwave/spectral.hpp"

namespace spwave {

/// Coefficients whose magnitude exceeds this abort the run.
inline constexpr double kBlowUpThreshold = 1e8;

struct ModelParams {
  double nu = 0.1;
  double alpha = 0.0;
  double horizon = 1.0;
  std::size_t steps = 2048;
  SpectralBasis basis{1.0, 32};
  Nonlinearity nonlinearity = Nonlinearity::cubic_default();
  CovarianceSpectrum noise = CovarianceSpectrum::power_law(32, 4.0);

  double dt() const noexcept { return horizon / static_cast<double>(steps); }
  /// Noise strength nu^alpha.
  double sigma() const;
  /// Throws ConfigError listing every violated constraint, including the
  /// excluded boundary exponent alpha = 1.
  void validate() const;
};

struct WaveState {
  SpectralField u;
  SpectralField v;
  double t = 0.0;
};

struct SplitState {
  SpectralField v1;
  SpectralField v2;
  SpectralField v3;
  double t = 0.0;
};

/// Grid step indices (0..J) at which a run records its state.
struct Sampling {
  std::vector<std::size_t> steps;

  /// Steps 0, stride, 2 stride, ..., always including J.
  static Sampling every(std::size_t total_steps, std::size_t stride = 1);
  /// Throws ShapeError when a time is not on the integrator grid.
  static Sampling at_times(std::span<const double> times, double horizon, std::size_t total_steps);
  /// count equally spaced times T i / count, i = 1..count (count must divide J).
  static Sampling uniform(std::size_t count, std::size_t total_steps);
};

struct Trajectory {
  std::vector<std::size_t> steps;
  std::vector<double> times;
  std::vector<SpectralField> u;
  /// Velocity samples; empty for first-order models.
  std::vector<SpectralField> v;

  std::size_t size() const noexcept { return times.size(); }
};

/// One run of the full system advanced together with its split velocity.
struct SplitRun {
  ModelParams params;
  Trajectory full;
  std::vector<SpectralField> v1;
  std::vector<SpectralField> v2;
  std::vector<SpectralField> v3;
  /// Displacement integrated from the split velocity
  /// u_t = v1 / nu + v2 + nu^(alpha - 1/2) v3.
  std::vector<SpectralField> u_split;
  /// True when every grid step was recorded (required by the weak audit).
  bool every_step = false;
};

/// Exact 2x2 propagator of one mode of the linear damped oscillator
/// X' = B X, B = [[0, 1], [-lambda/nu, -1/nu]], plus the response to a unit
/// forcing held constant in the v row over the step.
struct OscillatorPropagator {
  double uu = 1.0, uv = 0.0, vu = 0.0, vv = 1.0;
  double force_u = 0.0, force_v = 0.0;

  static OscillatorPropagator make(double lambda, double nu, double h);
};

/// Stochastic exponential Euler for the full (u, v) system.
class FullWaveStepper {
 public:
  FullWaveStepper(const ModelParams& params, double h);

  /// Advances state by h. dW may be empty (no noise). Throws BlowUpError.
  void step(WaveState& state, std::span<const double> dw);
  /// Same, with f(u) already projected onto the basis.
  void step(WaveState& state, const SpectralField& fu, std::span<const double> dw);

  double h() const noexcept { return h_; }

 private:
  ModelParams params_;
  double h_;
  double noise_rate_;  // nu^(alpha - 1) / h
  std::vector<OscillatorPropagator> modes_;
  std::vector<double> scratch_;
  SpectralField forcing_;
};

/// Exponential Euler for the heat limit u_t = -A u + f(u) + nu^alpha dW/dt.
class HeatStepper {
 public:
  HeatStepper(const ModelParams& params, double h);
  void step(SpectralField& u, double t, std::span<const double> dw);

 private:
  ModelParams params_;
  double h_;
  double noise_rate_;  // nu^alpha / h
  std::vector<double> decay_;
  std::vector<double> gain_;
  std::vector<double> scratch_;
  SpectralField forcing_;
};

WaveState step_full_wave(const WaveState& state, const ModelParams& params, std::span<const double> dw, double h);

/// v1(t) = nu e^(-t/nu) u1, in closed form.
SpectralField evolve_v1(const ModelParams& params, const SpectralField& u1, double t);

/// Exact relaxation towards g = -A u + f(u) with g frozen at the step start.
SpectralField step_v2(const SpectralField& v2, const SpectralField& u, const ModelParams& params, double h);

/// Ornstein-Uhlenbeck update v3 <- e^(-h/nu) v3 + c dW with
/// c = sqrt((1 - e^(-2h/nu)) / (2h)), giving the exact one-step variance
/// b_k (1 - e^(-2h/nu)) / 2 while reusing the shared increment.
SpectralField step_v3(const SpectralField& v3, const ModelParams& params, std::span<const double> dw, double h);

/// Throws ShapeError unless the path matches the parameter grid.
void check_path(const ModelParams& params, const NoisePath& path);

Trajectory simulate_full(const ModelParams& params, const NoisePath& noise, const SpectralField& u0,
                         const SpectralField& u1, const Sampling& sampling, IncrementAudit* audit = nullptr);

Trajectory simulate_heat(const ModelParams& params, const NoisePath& noise, const SpectralField& u0,
                         const Sampling& sampling, IncrementAudit* audit = nullptr);

/// Deterministic limit nu u_tt + u_t = -A u + f(u): the full scheme with the
/// noise switched off.
Trajectory simulate_det_wave(const ModelParams& params, const SpectralField& u0, const SpectralField& u1,
                             const Sampling& sampling);

SplitRun run_split(const ModelParams& params, const NoisePath& noise, const SpectralField& u0,
                   const SpectralField& u1, const Sampling& sampling);

/// ||nu v - v1 - nu v2 - nu^(alpha+1/2) v3||_0 at every recorded sample.
std::vector<double> reconstruction_defect(const SplitRun& run);

/// nu ||v||^2 / 2 + ||u||_1^2 / 2 - int F(u).
double energy(const WaveState& state, const ModelParams& params);

}  // namespace spwave
