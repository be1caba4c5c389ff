#pragma once

// Independent reference computations shared by the unit tests. None of these
// go through the library's transforms or integrators.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace spwave::ref {

/// Direct evaluation of sum_k a_k sqrt(2/L) sin(k pi x / L).
inline double sine_sum(const std::vector<double>& a, double length, double x) {
  double acc = 0.0;
  for (std::size_t k = 1; k <= a.size(); ++k)
    acc += a[k - 1] * std::sqrt(2.0 / length) * std::sin(static_cast<double>(k) * std::numbers::pi * x / length);
  return acc;
}

/// int_a^b g dx by composite 20-point Gauss-Legendre on 32 panels.
template <typename G>
double integrate(G&& g, double a, double b) {
  const int panels = 32;
  const double w = (b - a) / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i)
    acc += boost::math::quadrature::gauss<double, 20>::integrate(g, a + i * w, a + (i + 1) * w);
  return acc;
}

/// int_0^L g(x) e_k(x) dx.
template <typename G>
double project_quadrature(G&& g, double length, std::size_t k) {
  return integrate(
      [&](double x) {
        return g(x) * std::sqrt(2.0 / length) * std::sin(static_cast<double>(k) * std::numbers::pi * x / length);
      },
      0.0, length);
}

/// int_0^L e_i e_j e_l e_k dx in closed form, from product-to-sum identities:
/// only cosine terms with zero total frequency survive.
inline double quartic_overlap(int i, int j, int l, int k, double length) {
  const int p[2] = {i - j, i + j};
  const int q[2] = {l - k, l + k};
  const int sp[2] = {1, -1};
  double sum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int s = sp[a] * sp[b];
      if (p[a] - q[b] == 0) sum += s;
      if (p[a] + q[b] == 0) sum += s;
    }
  return sum / (2.0 * length);
}

/// Galerkin projection of u - u^3 onto modes 1..N using quartic_overlap.
inline std::vector<double> cubic_projection(const std::vector<double>& a, double length) {
  const int n = static_cast<int>(a.size());
  std::vector<double> out(a);
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        for (int l = 1; l <= n; ++l) acc += a[i - 1] * a[j - 1] * a[l - 1] * quartic_overlap(i, j, l, k, length);
    out[k - 1] -= acc;
  }
  return out;
}

inline double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(x.size() - 1);
}

}  // namespace spwave::ref
