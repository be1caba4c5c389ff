#include "spwave/kernels.hpp"

#include <omp.h>

namespace spwave::kernels {

void synthesize_serial(std::span<const double> table, std::size_t modes,
                       std::span<const double> coeffs, std::span<double> samples) {
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double* row = table.data() + j * modes;
    double acc = 0.0;
    for (std::size_t k = 0; k < modes; ++k) acc += row[k] * coeffs[k];
    samples[j] = acc;
  }
}

void synthesize_parallel(std::span<const double> table, std::size_t modes,
                         std::span<const double> coeffs, std::span<double> samples) {
  const auto rows = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < rows; ++j) {
    const double* row = table.data() + static_cast<std::size_t>(j) * modes;
    double acc = 0.0;
    for (std::size_t k = 0; k < modes; ++k) acc += row[k] * coeffs[k];
    samples[static_cast<std::size_t>(j)] = acc;
  }
}

void analyze_serial(std::span<const double> table, std::size_t modes, double weight,
                    std::span<const double> samples, std::span<double> coeffs) {
  for (std::size_t k = 0; k < modes; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) acc += table[j * modes + k] * samples[j];
    coeffs[k] = weight * acc;
  }
}

void analyze_parallel(std::span<const double> table, std::size_t modes, double weight,
                      std::span<const double> samples, std::span<double> coeffs) {
  const auto n = static_cast<std::ptrdiff_t>(modes);
  const std::size_t rows = samples.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < rows; ++j)
      acc += table[j * modes + static_cast<std::size_t>(k)] * samples[j];
    coeffs[static_cast<std::size_t>(k)] = weight * acc;
  }
}

bool in_parallel_region() { return omp_in_parallel() != 0; }

}  // namespace spwave::kernels
