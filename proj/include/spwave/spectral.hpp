#pragma once

// Dirichlet sine eigenbasis on (0, L), coefficient-space fields, Sobolev
// norms and pseudospectral evaluation of polynomial nonlinearities.
//
// Eigenpairs of A = -d^2/dx^2 with u(0) = u(L) = 0:
//   e_k(x) = sqrt(2/L) sin(k pi x / L),  lambda_k = (k pi / L)^2,  k = 1..N.
// Physical samples live on the interior nodes x_j = j L / (M + 1), j = 1..M,
// with M = 2N. On that grid the discrete sine transform is an exact
// isometry for modes 1..M, and products of three fields supported on modes
// 1..N project back onto modes 1..N without aliasing.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace spwave {

class SpectralBasis {
 public:
  /// Throws ConfigError for non-positive length or zero modes.
  SpectralBasis(double length, std::size_t modes);

  double length() const noexcept { return data_->length; }
  std::size_t modes() const noexcept { return data_->modes; }
  std::size_t grid_size() const noexcept { return data_->grid; }

  /// lambda_k for k = 1..N, stored at index k - 1.
  std::span<const double> eigenvalues() const noexcept { return data_->lambda; }
  double eigenvalue(std::size_t index) const { return data_->lambda[index]; }

  /// Interior quadrature nodes x_1..x_M.
  std::span<const double> nodes() const noexcept { return data_->nodes; }

  /// Weight of the sine-grid quadrature, L / (M + 1).
  double quadrature_weight() const noexcept { return data_->weight; }

  /// Row-major M x N table of e_k(x_j).
  std::span<const double> table() const noexcept { return data_->table; }

  /// e_k(x) for the 1-based mode number k.
  double eigenfunction(std::size_t k, double x) const;

  /// Same underlying basis object, or same (L, N).
  bool compatible(const SpectralBasis& other) const noexcept;

 private:
  struct Data {
    double length;
    std::size_t modes;
    std::size_t grid;
    double weight;
    std::vector<double> lambda;
    std::vector<double> nodes;
    std::vector<double> table;
  };
  std::shared_ptr<const Data> data_;
};

/// Coefficient vector a_1..a_N of a field in the sine eigenbasis.
class SpectralField {
 public:
  explicit SpectralField(SpectralBasis basis);
  SpectralField(SpectralBasis basis, std::vector<double> coeffs);

  const SpectralBasis& basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<double> coeffs() noexcept { return coeffs_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// ||.||_s = (sum lambda_k^s a_k^2)^(1/2).
  double norm(double s = 0.0) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

  /// Unit coefficient on the 1-based mode k.
  static SpectralField unit(const SpectralBasis& basis, std::size_t k);

 private:
  SpectralBasis basis_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double scale, SpectralField a);

/// L^2 inner product, which is the Euclidean product of coefficients.
double inner(const SpectralField& a, const SpectralField& b);

double sobolev_norm(const SpectralField& field, double s);

/// Samples of the field at the basis nodes.
std::vector<double> to_physical(const SpectralField& field);
void to_physical(const SpectralField& field, std::span<double> samples);

/// Projection of nodal samples onto modes 1..N. Throws ShapeError when the
/// sample count differs from the grid size.
SpectralField from_physical(const SpectralBasis& basis, std::span<const double> samples);
void from_physical(std::span<const double> samples, SpectralField& out);

/// Polynomial nonlinearity f(s) = c0 + c1 s + c2 s^2 + c3 s^3.
class Nonlinearity {
 public:
  enum class Kind { cubic_default, custom_polynomial };

  /// f(s) = s - s^3.
  static Nonlinearity cubic_default();
  static Nonlinearity polynomial(std::array<double, 4> coefficients);
  /// f = 0, used for linear runs.
  static Nonlinearity zero();

  Kind kind() const noexcept { return kind_; }
  const std::array<double, 4>& coefficients() const noexcept { return c_; }
  bool is_zero() const noexcept;

  double operator()(double s) const noexcept;
  double derivative(double s) const noexcept;
  /// F(s) = int_0^s f(r) dr.
  double antiderivative(double s) const noexcept;

 private:
  Nonlinearity(Kind kind, std::array<double, 4> c) : kind_(kind), c_(c) {}
  Kind kind_;
  std::array<double, 4> c_;
};

/// Spectral projection of f(u(x)) onto modes 1..N, evaluated on the 2N-point
/// sine grid. Exact for the odd part of f; the even part (c0, c2) carries the
/// quadrature error of the sine grid.
SpectralField apply_nonlinearity(const Nonlinearity& f, const SpectralField& u);

/// Workspace-reusing variant for inner loops.
void apply_nonlinearity(const Nonlinearity& f, const SpectralField& u, std::span<double> scratch,
                        SpectralField& out);

/// int_0^L F(u(x)) dx on the sine grid. Exact when F is an even polynomial of
/// degree <= 4 (e.g. the default cubic) and u lives on modes 1..N.
double integrate_antiderivative(const Nonlinearity& f, const SpectralField& u);

}  // namespace spwave
