#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spwave/analysis.hpp"
#include "spwave/errors.hpp"

using namespace spwave;

namespace {

ModelParams audit_params(double nu, std::size_t steps, std::size_t modes = 8) {
  ModelParams p;
  p.nu = nu;
  p.alpha = 0.5;
  p.horizon = 1.0;
  p.steps = steps;
  p.basis = SpectralBasis(1.0, modes);
  p.noise = CovarianceSpectrum::power_law(modes, 4.0);
  return p;
}

TestFunction default_phi(const SpectralBasis& basis) {
  return {SpectralField(basis, {1.0, 0.5}), TemporalFactor::polynomial({1.0, 1.0})};
}

}  // namespace

TEST(TemporalFactor, DerivativeMatchesFiniteDifference) {
  const std::vector<TemporalFactor> factors{TemporalFactor::polynomial({1.0, -2.0, 0.5, 3.0}),
                                            TemporalFactor::trigonometric(0.5, 1.0, -2.0, 3.0),
                                            TemporalFactor::constant(2.0)};
  const double d = 1e-6;
  for (const auto& g : factors)
    for (double t : {0.0, 0.3, 0.9})
      EXPECT_NEAR(g.derivative(t), (g.value(t + d) - g.value(t - d)) / (2 * d), 1e-7);
  EXPECT_DOUBLE_EQ(TemporalFactor::polynomial({1.0, 2.0, 3.0}).value(2.0), 17.0);
  EXPECT_DOUBLE_EQ(TemporalFactor::trigonometric(1.0, 2.0, 0.0, 0.0).value(5.0), 3.0);
}

TEST(TestFunction, LaplacianIsMinusEigenvalueTimesProfile) {
  SpectralBasis basis(2.0, 4);
  TestFunction phi{SpectralField(basis, {1.0, 0.0, -0.5}), TemporalFactor::polynomial({2.0, 1.0})};
  const auto lap = phi.laplacian(0.5);
  EXPECT_NEAR(lap[0], -basis.eigenvalue(0) * 2.5, 1e-12);
  EXPECT_NEAR(lap[2], 0.5 * basis.eigenvalue(2) * 2.5, 1e-12);
  EXPECT_EQ(phi.time_derivative(0.3)[0], 1.0);
}

TEST(WeakPairing, RecordedTimesOnly) {
  const auto p = audit_params(0.1, 64);
  const auto path = sample_path(p.noise, 1.0, 64, 1);
  const SpectralField u0(p.basis, {0.25});
  const auto traj = simulate_heat(p, path, u0, Sampling::uniform(4, 64));
  const auto phi = default_phi(p.basis);
  EXPECT_NEAR(weak_pairing(traj, phi, 0.5), inner(traj.u[1], phi.at(0.5)), 1e-15);
  EXPECT_THROW(weak_pairing(traj, phi, 0.3), ShapeError);
}

TEST(ExpansionAudit, VanishesWithoutDataOrNoise) {
  auto p = audit_params(0.01, 256);
  p.noise = CovarianceSpectrum::zero(8);
  const auto path = sample_path(p.noise, 1.0, 256, 0);
  const SpectralField zero(p.basis);
  const auto run = run_split(p, path, zero, zero, Sampling::every(256));
  const auto table = expansion_audit(run, path, default_phi(p.basis), Sampling::uniform(4, 256));
  ASSERT_EQ(table.times.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(table.lhs[i], 0.0);
    EXPECT_EQ(table.v1_term[i], 0.0);
    EXPECT_EQ(table.v2_boundary[i], 0.0);
    EXPECT_EQ(table.v2_integral[i], 0.0);
    EXPECT_EQ(table.v3_term[i], 0.0);
    EXPECT_EQ(table.ito[i], 0.0);
  }
}

TEST(ExpansionAudit, DefectIsFirstOrderInStep) {
  const std::size_t fine = 4096;
  const auto base = audit_params(0.01, fine);
  const auto master = sample_path(base.noise, 1.0, fine, 7);
  const SpectralField u0(base.basis, {0.25}), u1(base.basis, {1.0});
  double previous = 0.0;
  for (std::size_t steps : {1024u, 2048u, 4096u}) {
    auto p = base;
    p.steps = steps;
    const auto path = coarsen(master, fine / steps);
    const auto run = run_split(p, path, u0, u1, Sampling::every(steps));
    const auto table = expansion_audit(run, path, default_phi(p.basis), Sampling::uniform(8, steps));
    double worst = 0.0;
    for (double d : table.defect) worst = std::max(worst, std::abs(d));
    EXPECT_LE(worst, 20.0 * p.dt()) << "J=" << steps;
    if (previous > 0.0) {
      EXPECT_NEAR(previous / worst, 2.0, 0.5) << "J=" << steps;
    }
    previous = worst;
  }
}

TEST(ExpansionAudit, ResidualIsDifferenceOfStochasticTerms) {
  const auto p = audit_params(0.01, 512);
  const auto path = sample_path(p.noise, 1.0, 512, 3);
  const SpectralField u0(p.basis, {0.25});
  const auto run = run_split(p, path, u0, SpectralField(p.basis), Sampling::every(512));
  const auto table = expansion_audit(run, path, default_phi(p.basis), Sampling::uniform(4, 512));
  const auto r = table.v3_residual();
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], table.v3_term[i] - table.ito[i]);
  // Ito term computed independently: nu^alpha sum_j <phi(t_j), dW_j>.
  const auto phi = default_phi(p.basis);
  double ito = 0.0;
  for (std::size_t j = 0; j < 512; ++j) {
    const auto phi_j = phi.at(j * p.dt());
    const auto dw = path.increments(j);
    for (std::size_t k = 0; k < 8; ++k) ito += phi_j[k] * dw[k];
  }
  EXPECT_NEAR(table.ito.back(), std::sqrt(0.01) * ito, 1e-14);
}

TEST(ExpansionAudit, RequiresPerStepComponents) {
  const auto p = audit_params(0.01, 64);
  const auto path = sample_path(p.noise, 1.0, 64, 3);
  const SpectralField u0(p.basis, {0.25});
  const auto run = run_split(p, path, u0, u0, Sampling::uniform(4, 64));
  try {
    expansion_audit(run, path, default_phi(p.basis), Sampling::uniform(4, 64));
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("missing split components"), std::string::npos);
  }
}

TEST(SupError, IdenticalAndShiftedTrajectories) {
  const auto p = audit_params(0.1, 64);
  const auto path = sample_path(p.noise, 1.0, 64, 4);
  const SpectralField u0(p.basis, {0.25});
  const auto a = simulate_heat(p, path, u0, Sampling::uniform(8, 64));
  EXPECT_EQ(sup_error(a, a).sup, 0.0);
  auto b = a;
  for (auto& u : b.u) u = u + (-0.3) * SpectralField::unit(p.basis, 1);
  const auto report = sup_error(a, b);
  for (double e : report.errors) EXPECT_NEAR(e, 0.3, 1e-15);
  EXPECT_NEAR(report.sup, 0.3, 1e-15);
}

TEST(SupError, FullVersusHeatIsSmallForSmallNu) {
  auto p = audit_params(1e-3, 1024, 16);
  p.alpha = 0.0;
  const auto path = sample_path(p.noise, 1.0, 1024, 5);
  const SpectralField u0(p.basis, {0.25}), u1(p.basis);
  const auto sampling = Sampling::uniform(32, 1024);
  const auto report = sup_error(simulate_full(p, path, u0, u1, sampling), simulate_heat(p, path, u0, sampling));
  EXPECT_GT(report.sup, 0.0);
  EXPECT_LT(report.sup, 1.0);
}

TEST(SupError, RejectsMismatchedGrids) {
  const auto p = audit_params(0.1, 64);
  const auto path = sample_path(p.noise, 1.0, 64, 4);
  const SpectralField u0(p.basis, {0.25});
  const auto a = simulate_heat(p, path, u0, Sampling::uniform(8, 64));
  const auto b = simulate_heat(p, path, u0, Sampling::uniform(4, 64));
  EXPECT_THROW(sup_error(a, b), ShapeError);
}

TEST(RateFit, RecoversExactPowerLaws) {
  for (double slope : {0.5, 1.0, 1.5}) {
    std::vector<std::pair<double, double>> points;
    for (double nu : {1e-1, 1e-2, 1e-3, 1e-4}) points.emplace_back(nu, 3.0 * std::pow(nu, slope));
    const auto fit = rate_fit(points);
    EXPECT_NEAR(fit.slope, slope, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
    EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  }
}

TEST(RateFit, RejectsDegenerateInput) {
  const std::vector<std::pair<double, double>> two{{0.1, 1.0}, {0.01, 0.5}};
  EXPECT_THROW(rate_fit(two), RateFitError);
  const std::vector<std::pair<double, double>> repeated{{0.1, 1.0}, {0.1, 0.9}, {0.01, 0.5}};
  EXPECT_THROW(rate_fit(repeated), RateFitError);
  const std::vector<std::pair<double, double>> zero{{0.1, 1.0}, {0.01, 0.0}, {0.001, 0.5}};
  try {
    rate_fit(zero);
    FAIL() << "expected RateFitError";
  } catch (const RateFitError& e) {
    EXPECT_NE(std::string(e.what()).find("noise floor"), std::string::npos);
  }
}

TEST(Ensemble, ConstantStatisticHasZeroStandardError) {
  const auto stats = ensemble(10, 1, [](std::size_t, std::uint64_t) { return std::vector<double>{2.5, -1.0}; }, 4);
  EXPECT_EQ(stats.replicas, 10u);
  EXPECT_EQ(stats.mean, (std::vector<double>{2.5, -1.0}));
  EXPECT_EQ(stats.stderr_, (std::vector<double>{0.0, 0.0}));
}

TEST(Ensemble, ParallelEqualsSerialBitwise) {
  const auto p = audit_params(0.01, 256);
  const SpectralField u0(p.basis, {0.25});
  const ReplicaFn fn = [&](std::size_t, std::uint64_t seed) {
    const auto path = sample_path(p.noise, 1.0, 256, seed);
    const auto traj = simulate_full(p, path, u0, SpectralField(p.basis), Sampling::uniform(4, 256));
    return std::vector<double>{traj.u.back().norm(0.0), traj.u[1][0]};
  };
  const auto serial = ensemble_serial(12, 99, fn);
  for (int threads : {1, 3, 8}) {
    const auto parallel = ensemble(12, 99, fn, threads);
    EXPECT_EQ(parallel.mean, serial.mean);
    EXPECT_EQ(parallel.stderr_, serial.stderr_);
    EXPECT_EQ(parallel.samples, serial.samples);
  }
  EXPECT_NE(ensemble(12, 100, fn, 2).mean, serial.mean);
}

TEST(Ensemble, SummaryMatchesHandComputation) {
  const auto stats = summarize({{1.0}, {2.0}, {4.0}});
  EXPECT_NEAR(stats.mean[0], 7.0 / 3.0, 1e-15);
  const double var = ((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) + (4 - 7.0 / 3) * (4 - 7.0 / 3)) / 2;
  EXPECT_NEAR(stats.stderr_[0], std::sqrt(var / 3), 1e-15);
}

TEST(Ensemble, ReplicaExceptionPropagates) {
  const ReplicaFn fn = [](std::size_t r, std::uint64_t) -> std::vector<double> {
    if (r == 5) throw BlowUpError("boom", 0.5, 1, 1e9);
    return {1.0};
  };
  EXPECT_THROW(ensemble(8, 1, fn, 4), BlowUpError);
}
