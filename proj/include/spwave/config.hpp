#pragma once

// Experiment configuration: an INI file with flat sections.
//
//   [experiment]  kind, nu (list), alpha, replicas, seed
//   [basis]       length, modes
//   [noise]       exponent, scale, coefficients (explicit list, overrides the power law)
//   [model]       nonlinearity = cubic_default | polynomial | zero, coefficients = c0, c1, c2, c3
//   [initial]     u0, u1 = preset name (zero | mode1 | smooth) or coefficient list
//   [time]        horizon, steps, output_count, output_times (list, overrides output_count)
//   [audit]       profile (list), factor = polynomial | trigonometric, coefficients (list)
//
// Lists are comma separated. Unknown sections or keys are errors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spwave/analysis.hpp"
#include "spwave/dynamics.hpp"

namespace spwave {

enum class ExperimentKind { full_vs_heat, full_vs_detwave, split_audit, component_scaling, oracle_suite };

std::string to_string(ExperimentKind kind);

/// Initial datum given by a named preset or by explicit mode coefficients.
struct FieldSpec {
  std::string preset;  // empty when coefficients are explicit
  std::vector<double> coefficients;

  static FieldSpec named(std::string name) { return {std::move(name), {}}; }
  static FieldSpec explicit_modes(std::vector<double> c) { return {"", std::move(c)}; }

  SpectralField build(const SpectralBasis& basis) const;
  bool operator==(const FieldSpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::full_vs_heat;
  std::vector<double> nu{1e-1, 1e-2, 1e-3, 1e-4};
  double alpha = 0.0;
  std::size_t replicas = 16;
  std::uint64_t seed = 1;

  double length = 1.0;
  std::size_t modes = 32;

  double noise_exponent = 4.0;
  double noise_scale = 1.0;
  std::vector<double> noise_coefficients;

  std::string nonlinearity = "cubic_default";
  std::array<double, 4> polynomial{0.0, 1.0, 0.0, -1.0};

  FieldSpec u0 = FieldSpec::explicit_modes({0.25});
  FieldSpec u1 = FieldSpec::named("zero");

  double horizon = 1.0;
  std::size_t steps = 2048;
  std::size_t output_count = 128;
  std::vector<double> output_times;

  std::vector<double> audit_profile{1.0, 0.5};
  std::string audit_factor = "polynomial";
  std::vector<double> audit_coefficients{1.0, 1.0};

  SpectralBasis basis() const;
  CovarianceSpectrum spectrum() const;
  Nonlinearity build_nonlinearity() const;
  ModelParams model(double nu_value) const;
  Sampling sampling() const;
  TestFunction test_function() const;

  /// Throws ConfigError listing every violated constraint.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates. Throws ConfigError with one entry per violation.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical INI text with every field spelled out at full precision;
/// parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);

}  // namespace spwave
