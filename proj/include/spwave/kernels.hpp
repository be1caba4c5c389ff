#pragma once

// Data-parallel inner loops of the solver. Every kernel comes as a serial
// reference and an OpenMP variant. The OpenMP variants split work over
// independent outputs only, and each output is accumulated in the same order
// as in the serial reference, so both produce bit-identical results.

#include <cstddef>
#include <span>

namespace spwave::kernels {

/// samples[j] = sum_k table[j * modes + k] * coeffs[k]
void synthesize_serial(std::span<const double> table, std::size_t modes,
                       std::span<const double> coeffs, std::span<double> samples);
void synthesize_parallel(std::span<const double> table, std::size_t modes,
                         std::span<const double> coeffs, std::span<double> samples);

/// coeffs[k] = weight * sum_j table[j * modes + k] * samples[j]
void analyze_serial(std::span<const double> table, std::size_t modes, double weight,
                    std::span<const double> samples, std::span<double> coeffs);
void analyze_parallel(std::span<const double> table, std::size_t modes, double weight,
                      std::span<const double> samples, std::span<double> coeffs);

/// Work size (grid points x modes) above which the basis dispatches to the
/// OpenMP kernels when called outside an enclosing parallel region.
inline constexpr std::size_t kParallelTransformThreshold = std::size_t{1} << 16;

/// True when called from inside an active OpenMP parallel region.
bool in_parallel_region();

}  // namespace spwave::kernels
