#pragma once

// Q-Wiener process W(t) = sum_k sqrt(b_k) e_k w_k(t) truncated to N modes.
//
// Increments are drawn from a counter-based generator keyed by
// (seed, mode, step), so any increment can be reproduced on its own and the
// draw order never matters. Models compared on one realisation share a single
// path; coarser step sizes consume it through coarsen().

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "spwave/spectral.hpp"

namespace spwave {

/// The sequence b_k of eigenvalues of the covariance operator Q.
class CovarianceSpectrum {
 public:
  /// Throws ConfigError on negative or non-finite entries.
  explicit CovarianceSpectrum(std::vector<double> b);

  /// b_k = scale * k^(-exponent), k = 1..modes.
  static CovarianceSpectrum power_law(std::size_t modes, double exponent, double scale = 1.0);
  static CovarianceSpectrum zero(std::size_t modes);
  /// b_1 = variance, all other modes silent.
  static CovarianceSpectrum single_mode(std::size_t modes, double variance = 1.0);

  std::size_t modes() const noexcept { return b_.size(); }
  std::span<const double> values() const noexcept { return b_; }
  double operator[](std::size_t i) const { return b_[i]; }
  bool is_zero() const noexcept;

  /// tr Q = sum b_k.
  double trace() const noexcept;
  /// sum lambda_k b_k; finite trace of A Q.
  double weighted_trace(const SpectralBasis& basis) const;

 private:
  std::vector<double> b_;
};

namespace rng {

/// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Standard normal for (seed, stream, counter); Box-Muller on two counters.
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// Seed of replica r derived from a base seed.
std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica) noexcept;

}  // namespace rng

/// Per-mode Brownian increments on a uniform time grid.
class NoisePath {
 public:
  NoisePath(std::uint64_t seed, double horizon, std::size_t steps, CovarianceSpectrum spectrum,
            std::vector<double> increments);

  std::uint64_t seed() const noexcept { return seed_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t modes() const noexcept { return spectrum_.modes(); }
  double step() const noexcept { return horizon_ / static_cast<double>(steps_); }
  double time(std::size_t j) const noexcept {
    return horizon_ * static_cast<double>(j) / static_cast<double>(steps_);
  }
  const CovarianceSpectrum& spectrum() const noexcept { return spectrum_; }

  /// Increments of all modes over step j, i.e. on [t_j, t_{j+1}).
  std::span<const double> increments(std::size_t j) const;
  double increment(std::size_t k, std::size_t j) const { return dw_[j * modes() + k]; }

  /// W_k(t_j), accumulated in extended precision.
  double cumulative(std::size_t k, std::size_t j) const;

  /// All increments, time-major: index j * N + k.
  std::span<const double> data() const noexcept { return dw_; }

 private:
  std::uint64_t seed_;
  double horizon_;
  std::size_t steps_;
  CovarianceSpectrum spectrum_;
  std::vector<double> dw_;
};

/// Increments dW_{k,j} ~ N(0, b_k T / J), independent across modes and steps.
/// Identical arguments give bit-identical paths.
NoisePath sample_path(const CovarianceSpectrum& q, double horizon, std::size_t steps, std::uint64_t seed);

/// Sum blocks of `factor` consecutive increments. Throws ConfigError when
/// factor does not divide the step count.
NoisePath coarsen(const NoisePath& path, std::size_t factor);

/// Left-point (Ito) sum  sum_j <phi(t_j), dW_j>.
double stochastic_integral(const NoisePath& path, const std::function<SpectralField(double)>& phi);

/// Counts and fingerprints every increment a model consumes, so two models
/// can be shown to have read the same realisation.
class IncrementAudit {
 public:
  void consume(std::span<const double> increments) noexcept;
  std::size_t steps() const noexcept { return steps_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  bool operator==(const IncrementAudit&) const = default;

 private:
  std::size_t steps_ = 0;
  std::uint64_t fingerprint_ = 0x9e3779b97f4a7c15ULL;
};

/// Binary dump, little-endian:
///   u64 seed | u64 N | u64 J | f64 T | f64 b_1..b_N | f64 dW[k][j] (row-major, mode-major)
void write_path(std::ostream& out, const NoisePath& path);
NoisePath read_path(std::istream& in);

}  // namespace spwave
