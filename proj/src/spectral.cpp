#include "spwave/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spwave/errors.hpp"
#include "spwave/kernels.hpp"

namespace spwave {

namespace {

bool use_parallel(const SpectralBasis& basis) {
  return basis.grid_size() * basis.modes() >= kernels::kParallelTransformThreshold &&
         !kernels::in_parallel_region();
}

void check_same_basis(const SpectralField& a, const SpectralField& b) {
  if (!a.basis().compatible(b.basis()))
    throw ShapeError("fields belong to different spectral bases");
}

}  // namespace

SpectralBasis::SpectralBasis(double length, std::size_t modes) {
  std::vector<std::string> problems;
  if (!(length > 0.0) || !std::isfinite(length))
    problems.push_back("basis.length: must be positive, got " + std::to_string(length));
  if (modes == 0) problems.push_back("basis.modes: must be at least 1");
  if (!problems.empty()) throw ConfigError(problems);

  auto data = std::make_shared<Data>();
  data->length = length;
  data->modes = modes;
  data->grid = 2 * modes;
  data->weight = length / static_cast<double>(data->grid + 1);

  const double pi = std::numbers::pi;
  data->lambda.resize(modes);
  for (std::size_t k = 1; k <= modes; ++k) {
    const double wave = static_cast<double>(k) * pi / length;
    data->lambda[k - 1] = wave * wave;
  }

  const std::size_t m = data->grid;
  data->nodes.resize(m);
  data->table.resize(m * modes);
  const double amplitude = std::sqrt(2.0 / length);
  for (std::size_t j = 1; j <= m; ++j) {
    data->nodes[j - 1] = static_cast<double>(j) * data->weight;
    for (std::size_t k = 1; k <= modes; ++k) {
      // Reduce j*k modulo 2(M+1) so the sine argument stays in [0, 2 pi).
      const std::size_t phase = (j * k) % (2 * (m + 1));
      data->table[(j - 1) * modes + (k - 1)] =
          amplitude * std::sin(pi * static_cast<double>(phase) / static_cast<double>(m + 1));
    }
  }
  data_ = std::move(data);
}

double SpectralBasis::eigenfunction(std::size_t k, double x) const {
  return std::sqrt(2.0 / length()) * std::sin(static_cast<double>(k) * std::numbers::pi * x / length());
}

bool SpectralBasis::compatible(const SpectralBasis& other) const noexcept {
  return data_ == other.data_ || (data_->length == other.data_->length && data_->modes == other.data_->modes);
}

SpectralField::SpectralField(SpectralBasis basis)
    : basis_(std::move(basis)), coeffs_(basis_.modes(), 0.0) {}

SpectralField::SpectralField(SpectralBasis basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() > basis_.modes())
    throw ShapeError("coefficient list longer than the basis mode count");
  coeffs_.resize(basis_.modes(), 0.0);
}

double SpectralField::norm(double s) const {
  const auto lambda = basis_.eigenvalues();
  double acc = 0.0;
  if (s == 0.0) {
    for (double a : coeffs_) acc += a * a;
  } else {
    for (std::size_t k = 0; k < coeffs_.size(); ++k) acc += std::pow(lambda[k], s) * coeffs_[k] * coeffs_[k];
  }
  return std::sqrt(acc);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_same_basis(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_same_basis(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (double& a : coeffs_) a *= scale;
  return *this;
}

SpectralField SpectralField::unit(const SpectralBasis& basis, std::size_t k) {
  if (k == 0 || k > basis.modes()) throw ShapeError("mode number out of range");
  SpectralField out(basis);
  out.coeffs_[k - 1] = 1.0;
  return out;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double scale, SpectralField a) { return a *= scale; }

double inner(const SpectralField& a, const SpectralField& b) {
  check_same_basis(a, b);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double sobolev_norm(const SpectralField& field, double s) { return field.norm(s); }

void to_physical(const SpectralField& field, std::span<double> samples) {
  const auto& basis = field.basis();
  if (samples.size() != basis.grid_size()) throw ShapeError("sample buffer does not match the basis grid");
  if (use_parallel(basis))
    kernels::synthesize_parallel(basis.table(), basis.modes(), field.coeffs(), samples);
  else
    kernels::synthesize_serial(basis.table(), basis.modes(), field.coeffs(), samples);
}

std::vector<double> to_physical(const SpectralField& field) {
  std::vector<double> samples(field.basis().grid_size());
  to_physical(field, samples);
  return samples;
}

void from_physical(std::span<const double> samples, SpectralField& out) {
  const auto& basis = out.basis();
  if (samples.size() != basis.grid_size())
    throw ShapeError("got " + std::to_string(samples.size()) + " samples for a grid of " +
                     std::to_string(basis.grid_size()));
  if (use_parallel(basis))
    kernels::analyze_parallel(basis.table(), basis.modes(), basis.quadrature_weight(), samples, out.coeffs());
  else
    kernels::analyze_serial(basis.table(), basis.modes(), basis.quadrature_weight(), samples, out.coeffs());
}

SpectralField from_physical(const SpectralBasis& basis, std::span<const double> samples) {
  SpectralField out(basis);
  from_physical(samples, out);
  return out;
}

Nonlinearity Nonlinearity::cubic_default() { return {Kind::cubic_default, {0.0, 1.0, 0.0, -1.0}}; }

Nonlinearity Nonlinearity::polynomial(std::array<double, 4> coefficients) {
  for (double c : coefficients)
    if (!std::isfinite(c)) throw ConfigError("model.polynomial: coefficients must be finite");
  return {Kind::custom_polynomial, coefficients};
}

Nonlinearity Nonlinearity::zero() { return {Kind::custom_polynomial, {0.0, 0.0, 0.0, 0.0}}; }

bool Nonlinearity::is_zero() const noexcept {
  return c_[0] == 0.0 && c_[1] == 0.0 && c_[2] == 0.0 && c_[3] == 0.0;
}

double Nonlinearity::operator()(double s) const noexcept {
  return c_[0] + s * (c_[1] + s * (c_[2] + s * c_[3]));
}

double Nonlinearity::derivative(double s) const noexcept {
  return c_[1] + s * (2.0 * c_[2] + s * 3.0 * c_[3]);
}

double Nonlinearity::antiderivative(double s) const noexcept {
  return s * (c_[0] + s * (c_[1] / 2.0 + s * (c_[2] / 3.0 + s * c_[3] / 4.0)));
}

void apply_nonlinearity(const Nonlinearity& f, const SpectralField& u, std::span<double> scratch,
                        SpectralField& out) {
  if (f.is_zero()) {
    for (double& a : out.coeffs()) a = 0.0;
    return;
  }
  to_physical(u, scratch);
  for (double& s : scratch) s = f(s);
  from_physical(scratch, out);
}

SpectralField apply_nonlinearity(const Nonlinearity& f, const SpectralField& u) {
  std::vector<double> scratch(u.basis().grid_size());
  SpectralField out(u.basis());
  apply_nonlinearity(f, u, scratch, out);
  return out;
}

double integrate_antiderivative(const Nonlinearity& f, const SpectralField& u) {
  const auto samples = to_physical(u);
  double acc = 0.0;
  for (double s : samples) acc += f.antiderivative(s);
  return u.basis().quadrature_weight() * acc;
}

}  // namespace spwave
