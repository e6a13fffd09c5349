#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "rampflow/diagnostics.hpp"
#include "rampflow/error.hpp"

namespace rampflow {
namespace {

StateField field(std::vector<double> rho, double x_min = 0.0, double x_max = 1.0) {
  const int n = static_cast<int>(rho.size());
  return StateField{build_grid(x_min, x_max, n), std::move(rho), 0.0};
}

RampConfig onramp(double q) {
  RampConfig r;
  r.on_interval = Interval{1.0, 1.1};
  r.q_on = RateSchedule::constant(q);
  return r;
}

TEST(Measures, TotalVariationMassAndDistance) {
  const auto a = field({0.1, 0.5, 0.2, 0.2});
  EXPECT_DOUBLE_EQ(total_variation(a), 0.4 + 0.3);
  EXPECT_DOUBLE_EQ(total_mass(a), 0.25 * 1.0);
  const auto b = field({0.1, 0.4, 0.2, 0.5});
  EXPECT_DOUBLE_EQ(l1_distance(a, b), 0.25 * (0.1 + 0.3));
  EXPECT_THROW(l1_distance(a, field({0.1, 0.2, 0.3})), DomainError);
  EXPECT_EQ(total_variation(std::vector<double>{}), 0.0);
}

TEST(Phi, PiecewiseLinearRamp) {
  EXPECT_EQ(phi(0.0), 0.0);
  EXPECT_EQ(phi(0.7499), 0.0);
  EXPECT_NEAR(phi(0.8), 0.5, 1e-12);
  EXPECT_EQ(phi(0.9), 1.0);
  EXPECT_EQ(phi(1.0), 1.0);
  EXPECT_THROW(phi(1.1), DomainError);
  for (int i = 0; i < 1000; ++i) {
    const double r = i / 999.0;
    EXPECT_GE(phi(r), 0.0);
    EXPECT_LE(phi(r), 1.0);
    if (i) EXPECT_GE(phi(r), phi((i - 1) / 999.0));
  }
}

Trajectory synthetic_trajectory() {
  Trajectory t;
  t.grid = build_grid(0.0, 1.0, 4);
  t.congestion_window = Interval{0.0, 1.0};
  const std::vector<std::vector<double>> states{{0.9, 0.9, 0.1, 0.1}, {0.8, 0.8, 0.8, 0.1}};
  const std::vector<double> dts{0.1, 0.2};
  double time = 0.0;
  for (std::size_t n = 0; n < states.size(); ++n) {
    StateField s{t.grid, states[n], time};
    t.snapshots.push_back(s);
    StepRecord r;
    r.step = static_cast<long>(n);
    r.t = time;
    r.dt = dts[n];
    r.tv = total_variation(s);
    r.congestion = congestion_integrand(s.rho, std::vector<double>(4, 1.0), t.grid.dx);
    t.steps.push_back(r);
    time += dts[n];
  }
  t.final_state = StateField{t.grid, {0.3, 0.3, 0.3, 0.3}, time};
  t.snapshots.push_back(t.final_state);
  return t;
}

TEST(Functionals, JAndPsiOnHandTrajectory) {
  const auto t = synthetic_trajectory();
  EXPECT_NEAR(functional_J(t), 0.1 * 0.8 + 0.2 * 0.7, 1e-15);
  // Psi: step 0 has two cells at phi = 1, step 1 three cells at phi = 0.5.
  EXPECT_NEAR(functional_Psi(t, 0.0, 1.0), 0.1 * 0.25 * 2.0 + 0.2 * 0.25 * 1.5, 1e-15);
  // A sub-window falls back to the snapshots.
  EXPECT_NEAR(functional_Psi(t, 0.0, 0.5), 0.1 * 0.25 * 2.0 + 0.2 * 0.25 * 1.0, 1e-15);
  EXPECT_THROW(functional_Psi(t, 0.5, 0.5), ConfigError);
}

TEST(Functionals, SubWindowNeedsEveryStepSnapshot) {
  auto t = synthetic_trajectory();
  t.snapshots.resize(1);
  EXPECT_THROW(functional_Psi(t, 0.0, 0.5), ConfigError);
}

TEST(TheoremConstants, PerLengthRateGivesReferenceValues) {
  const auto rho0 = field(std::vector<double>(1000, 0.3), -1.0, 4.0);
  const auto c = theorem_constants(VelocityLaw::linear(), onramp(1.2), ConvectiveKernel(0.5), rho0, 6.0);
  EXPECT_DOUBLE_EQ(c.L_vel, 2.0);
  EXPECT_DOUBLE_EQ(c.Q_T, 2.4);
  EXPECT_DOUBLE_EQ(c.H, 10.4);
  EXPECT_NEAR(c.rho0_l1, 1.5, 1e-13);
}

TEST(TheoremConstants, ScaledRateAndQuadraticLaw) {
  const auto rho0 = field(std::vector<double>(100, 0.3), -1.0, 4.0);
  const auto c = theorem_constants(VelocityLaw::linear(), onramp(12.0), ConvectiveKernel(0.5), rho0, 6.0);
  EXPECT_DOUBLE_EQ(c.Q_T, 24.0);
  EXPECT_DOUBLE_EQ(c.H, 32.0);
  const auto cq = theorem_constants(VelocityLaw::quadratic(), {}, ConvectiveKernel(0.25), rho0, 1.0);
  EXPECT_NEAR(cq.L_vel, 3.0, 1e-12);
  EXPECT_NEAR(cq.H, 8.0 * 3.0, 1e-11);
  EXPECT_EQ(cq.Q_T, 0.0);
}

TEST(TheoremConstants, R1AndItsIntegralMatchRiemannOracle) {
  const auto rho0 = field(std::vector<double>(500, 0.3), -1.0, 4.0);
  RampConfig ramps = onramp(0.0);
  ramps.q_on = RateSchedule({{0.0, 12.0}, {2.5, 4.0}});
  const auto c = theorem_constants(VelocityLaw::linear(), ramps, ConvectiveKernel(0.5), rho0, 6.0);
  EXPECT_NEAR(c.R1_upper(0.0), 1.5, 1e-13);
  EXPECT_NEAR(c.R1_upper(6.0), 1.5 + 0.1 * (12.0 * 2.5 + 4.0 * 3.5), 1e-12);
  const int n = 60000;
  double oracle = 0.0;
  for (int i = 0; i < n; ++i) oracle += c.R1_upper((i + 0.5) * 6.0 / n) * 6.0 / n;
  EXPECT_NEAR(c.r_T, oracle, 1e-8);
  EXPECT_DOUBLE_EQ(c.tv_bound(0.5, 0.0), 0.5);
  EXPECT_NEAR(c.tv_bound(0.5, 0.1), std::exp(0.1 * c.H) * (0.5 + 0.1 * c.Q_T), 1e-12);
}

TEST(MassLedger, ExactBookkeepingOnHandTrajectory) {
  Trajectory t;
  t.grid = build_grid(0.0, 1.0, 4);
  StepRecord r;
  r.dt = 0.5;
  r.mass = 0.375;
  r.fluxes = {0.4, 0.2, 0.1, 0.05};
  t.steps.push_back(r);
  t.final_state = StateField{t.grid, {0.5, 0.5, 0.5, 0.5}, 0.5};
  const auto ledger = mass_ledger(t);
  ASSERT_EQ(ledger.residuals.size(), 1u);
  EXPECT_NEAR(ledger.residuals[0], 0.0, 1e-15);
  t.final_state.rho[1] += 0.2;
  EXPECT_NEAR(mass_ledger(t).max_abs_residual, 0.05, 1e-15);
}

TEST(TvBoundCheck, DetectsViolationsWithTinyConstants) {
  auto t = synthetic_trajectory();
  t.final_state.rho = {0.0, 1.0, 0.0, 1.0};
  TheoremConstants generous;
  generous.H = 10.0;
  generous.Q_T = 10.0;
  EXPECT_TRUE(check_tv_bound(t, generous).holds);
  TheoremConstants zero;
  const auto check = check_tv_bound(t, zero);
  EXPECT_FALSE(check.holds);
  EXPECT_GT(check.violations, 0);
  EXPECT_LT(check.min_margin, 0.0);
  EXPECT_EQ(check.checked, 3);
}

}  // namespace
}  // namespace rampflow
