#pragma once

// Closed-form checks of the integrators: the transient velocity component,
// single linear damped-oscillator modes against their characteristic roots,
// and single heat modes against pure exponential decay.

#include <string>
#include <vector>

namespace spwave {

struct OracleCheck {
  std::string name;
  double error = 0.0;      // relative or absolute, as named by `measure`
  double tolerance = 0.0;
  std::string measure;     // "relative" or "absolute"
  bool passed = false;
};

/// Exact solution of nu u'' + u' + lambda u = 0 with u(0) = u0, u'(0) = v0,
/// from the complex characteristic roots of nu m^2 + m + lambda = 0.
double damped_mode_exact(double lambda, double nu, double u0, double v0, double t);

std::vector<OracleCheck> run_oracle_suite();

bool all_passed(const std::vector<OracleCheck>& checks);

}  // namespace spwave
