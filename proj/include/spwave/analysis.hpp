#pragma once

// Weak pairings, the term-by-term audit of the weak expansion of <u, phi>,
// sup-in-time errors between coupled runs, log-log rate regression and
// deterministic Monte Carlo ensembles.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "spwave/dynamics.hpp"
#include "spwave/noise.hpp"
#include "spwave/spectral.hpp"

namespace spwave {

/// Scalar temporal factor g(t) with an exact derivative.
class TemporalFactor {
 public:
  enum class Kind { polynomial, trigonometric };

  /// g(t) = sum_i c_i t^i.
  static TemporalFactor polynomial(std::vector<double> coefficients);
  /// g(t) = offset + a cos(w t) + b sin(w t); coefficients {offset, a, b, w}.
  static TemporalFactor trigonometric(double offset, double cos_amplitude, double sin_amplitude, double frequency);
  static TemporalFactor constant(double value = 1.0) { return polynomial({value}); }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& coefficients() const noexcept { return c_; }
  double value(double t) const noexcept;
  double derivative(double t) const noexcept;

 private:
  TemporalFactor(Kind kind, std::vector<double> c) : kind_(kind), c_(std::move(c)) {}
  Kind kind_;
  std::vector<double> c_;
};

/// phi(t, x) = g(t) psi(x) with psi a finite sine sum, so phi vanishes on the
/// boundary and phi_t, Laplacian(phi) are exact.
struct TestFunction {
  SpectralField profile;
  TemporalFactor factor = TemporalFactor::constant();

  SpectralField at(double t) const;
  SpectralField time_derivative(double t) const;
  /// Laplacian of phi(t), i.e. -A phi(t).
  SpectralField laplacian(double t) const;
};

/// <u(t), phi(t)> for a recorded sample time t. Throws ShapeError otherwise.
double weak_pairing(const Trajectory& traj, const TestFunction& phi, double t);

/// Terms of the weak identity at the audit times, where
///   lhs = <u(t),phi(t)> - <u0,phi(0)> - int <u,phi_t> - int <u,Lap phi> - int <f(u),phi>
/// and lhs = v1_term + v2_boundary + v2_integral + v3_term in the continuum:
///   v1_term     = (1/nu) int <v1, phi>
///   v2_boundary = -nu <v2(t), phi(t)>
///   v2_integral = nu int <v2, phi_t>
///   v3_term     = nu^(alpha - 1/2) int <v3, phi>
///   ito         = nu^alpha int <phi, dW>
struct AuditTable {
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> v1_term;
  std::vector<double> v2_boundary;
  std::vector<double> v2_integral;
  std::vector<double> v3_term;
  std::vector<double> ito;
  std::vector<double> defect;

  /// v3_term - ito, the part of order nu^(alpha + 1/2).
  std::vector<double> v3_residual() const;
};

/// Evaluates the identity along a run recorded at every step. Time integrals
/// use the exact step integrals of each component under the scheme's frozen
/// forcing, with phi held at the left endpoint. Throws std::invalid_argument
/// when the run lacks per-step split components.
AuditTable expansion_audit(const SplitRun& run, const NoisePath& noise, const TestFunction& phi,
                           const Sampling& audit_times);

struct ErrorReport {
  double nu = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> errors;
  double sup = 0.0;
};

/// Per-time ||a(t) - b(t)||_0 and its maximum. Throws ShapeError on grid mismatch.
ErrorReport sup_error(const Trajectory& a, const Trajectory& b);

struct RateFit {
  std::vector<double> nu;
  std::vector<double> error;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(error) on log(nu). Needs at least three distinct nu
/// values and strictly positive errors; throws RateFitError otherwise.
RateFit rate_fit(std::span<const std::pair<double, double>> points);

struct EnsembleStats {
  std::size_t replicas = 0;
  std::vector<double> mean;
  std::vector<double> stderr_;
  /// Per-replica statistic vectors, in replica order.
  std::vector<std::vector<double>> samples;
};

/// Returns a fixed-length vector of scalar statistics for one replica.
using ReplicaFn = std::function<std::vector<double>(std::size_t replica, std::uint64_t seed)>;

/// Runs `replicas` independent replicas with seeds derived from base_seed on
/// up to `threads` OpenMP threads. Results are reduced in replica order, so the
/// output does not depend on the thread count.
EnsembleStats ensemble(std::size_t replicas, std::uint64_t base_seed, const ReplicaFn& replica, int threads = 1);

/// Serial reference for ensemble().
EnsembleStats ensemble_serial(std::size_t replicas, std::uint64_t base_seed, const ReplicaFn& replica);

/// Mean and standard error of each statistic across the samples.
EnsembleStats summarize(std::vector<std::vector<double>> samples);

}  // namespace spwave
