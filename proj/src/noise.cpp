#include "spwave/noise.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "spwave/errors.hpp"

namespace spwave {

CovarianceSpectrum::CovarianceSpectrum(std::vector<double> b) : b_(std::move(b)) {
  for (std::size_t k = 0; k < b_.size(); ++k) {
    if (!std::isfinite(b_[k]) || b_[k] < 0.0)
      throw ConfigError("noise.coefficients[" + std::to_string(k + 1) + "]: must be finite and >= 0");
  }
}

CovarianceSpectrum CovarianceSpectrum::power_law(std::size_t modes, double exponent, double scale) {
  if (!std::isfinite(exponent)) throw ConfigError("noise.exponent: must be finite");
  std::vector<double> b(modes);
  for (std::size_t k = 1; k <= modes; ++k) b[k - 1] = scale * std::pow(static_cast<double>(k), -exponent);
  return CovarianceSpectrum(std::move(b));
}

CovarianceSpectrum CovarianceSpectrum::zero(std::size_t modes) {
  return CovarianceSpectrum(std::vector<double>(modes, 0.0));
}

CovarianceSpectrum CovarianceSpectrum::single_mode(std::size_t modes, double variance) {
  std::vector<double> b(modes, 0.0);
  if (modes > 0) b[0] = variance;
  return CovarianceSpectrum(std::move(b));
}

bool CovarianceSpectrum::is_zero() const noexcept {
  for (double v : b_)
    if (v != 0.0) return false;
  return true;
}

double CovarianceSpectrum::trace() const noexcept {
  double acc = 0.0;
  for (double v : b_) acc += v;
  return acc;
}

double CovarianceSpectrum::weighted_trace(const SpectralBasis& basis) const {
  if (basis.modes() != b_.size()) throw ShapeError("spectrum and basis mode counts differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < b_.size(); ++k) acc += basis.eigenvalue(k) * b_[k];
  return acc;
}

namespace rng {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// Uniform in (0, 1]: 53 random bits, offset so log() never sees zero.
double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  const std::uint64_t key = mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
  const double u1 = unit_open(mix64(key + 2 * counter));
  const double u2 = unit_open(mix64(key + 2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica) noexcept {
  return mix64(base_seed ^ mix64(replica ^ 0xd1b54a32d192ed03ULL));
}

}  // namespace rng

NoisePath::NoisePath(std::uint64_t seed, double horizon, std::size_t steps, CovarianceSpectrum spectrum,
                     std::vector<double> increments)
    : seed_(seed), horizon_(horizon), steps_(steps), spectrum_(std::move(spectrum)), dw_(std::move(increments)) {
  if (!(horizon > 0.0)) throw ConfigError("time.horizon: must be positive");
  if (steps == 0) throw ConfigError("time.steps: must be at least 1");
  if (dw_.size() != steps_ * spectrum_.modes()) throw ShapeError("increment array does not match N x J");
}

std::span<const double> NoisePath::increments(std::size_t j) const {
  return std::span<const double>(dw_).subspan(j * modes(), modes());
}

double NoisePath::cumulative(std::size_t k, std::size_t j) const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < j; ++i) acc += dw_[i * modes() + k];
  return static_cast<double>(acc);
}

NoisePath sample_path(const CovarianceSpectrum& q, double horizon, std::size_t steps, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw ConfigError("time.horizon: must be positive");
  if (steps == 0) throw ConfigError("time.steps: must be at least 1");
  const std::size_t n = q.modes();
  const double dt = horizon / static_cast<double>(steps);
  std::vector<double> dw(n * steps, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (q[k] == 0.0) continue;
    const double scale = std::sqrt(q[k] * dt);
    for (std::size_t j = 0; j < steps; ++j) dw[j * n + k] = scale * rng::standard_normal(seed, k, j);
  }
  return NoisePath(seed, horizon, steps, q, std::move(dw));
}

NoisePath coarsen(const NoisePath& path, std::size_t factor) {
  if (factor == 0 || path.steps() % factor != 0)
    throw ConfigError("coarsen: factor " + std::to_string(factor) + " does not divide " +
                      std::to_string(path.steps()) + " steps");
  if (factor == 1) return path;
  const std::size_t n = path.modes();
  const std::size_t coarse = path.steps() / factor;
  std::vector<double> dw(n * coarse);
  for (std::size_t k = 0; k < n; ++k) {
    // Differences of extended-precision prefix sums, so coarse and fine paths
    // agree on W at shared times up to a single rounding.
    long double prefix = 0.0L;
    double previous = 0.0;
    for (std::size_t j = 0; j < coarse; ++j) {
      for (std::size_t i = j * factor; i < (j + 1) * factor; ++i) prefix += path.increment(k, i);
      const double current = static_cast<double>(prefix);
      dw[j * n + k] = current - previous;
      previous = current;
    }
  }
  return NoisePath(path.seed(), path.horizon(), coarse, path.spectrum(), std::move(dw));
}

double stochastic_integral(const NoisePath& path, const std::function<SpectralField(double)>& phi) {
  double acc = 0.0;
  for (std::size_t j = 0; j < path.steps(); ++j) {
    const SpectralField value = phi(path.time(j));
    if (value.size() != path.modes()) throw ShapeError("test function and noise mode counts differ");
    const auto dw = path.increments(j);
    for (std::size_t k = 0; k < dw.size(); ++k) acc += value[k] * dw[k];
  }
  return acc;
}

void IncrementAudit::consume(std::span<const double> increments) noexcept {
  ++steps_;
  for (double v : increments) {
    fingerprint_ ^= std::bit_cast<std::uint64_t>(v);
    fingerprint_ = rng::mix64(fingerprint_);
  }
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("noise dump: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_path(std::ostream& out, const NoisePath& path) {
  put_u64(out, path.seed());
  put_u64(out, path.modes());
  put_u64(out, path.steps());
  put_f64(out, path.horizon());
  for (double b : path.spectrum().values()) put_f64(out, b);
  for (std::size_t k = 0; k < path.modes(); ++k)
    for (std::size_t j = 0; j < path.steps(); ++j) put_f64(out, path.increment(k, j));
}

NoisePath read_path(std::istream& in) {
  const std::uint64_t seed = get_u64(in);
  const std::uint64_t n = get_u64(in);
  const std::uint64_t steps = get_u64(in);
  const double horizon = get_f64(in);
  std::vector<double> b(n);
  for (auto& v : b) v = get_f64(in);
  std::vector<double> dw(n * steps);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < steps; ++j) dw[j * n + k] = get_f64(in);
  return NoisePath(seed, horizon, steps, CovarianceSpectrum(std::move(b)), std::move(dw));
}

}  // namespace spwave
