// Randomised checks with a fixed seed.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rampflow/diagnostics.hpp"
#include "rampflow/fv_solver.hpp"

namespace rampflow {
namespace {

struct RandomCase {
  SimulationSetup setup;
  StateField state;
};

RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> cells(8, 64);
  const int n = cells(rng);
  const Grid g = build_grid(0.0, 1.0, n);
  const double eta = 0.02 + 0.5 * unit(rng);
  const double delta = eta * (2.0 * unit(rng) - 1.0);

  RampConfig ramps;
  if (unit(rng) < 0.8) {
    const double a = 0.6 * unit(rng);
    ramps.on_interval = Interval{a, a + 0.05 + 0.3 * unit(rng)};
    ramps.q_on = RateSchedule::constant(30.0 * unit(rng));
  }
  if (unit(rng) < 0.5) {
    const double a = 0.6 * unit(rng);
    ramps.off_interval = Interval{a, a + 0.05 + 0.3 * unit(rng)};
    ramps.q_off = RateSchedule::constant(30.0 * unit(rng));
  }
  SolverConfig solver;
  solver.t_final = 1.0;
  solver.cfl = 0.05 + 0.95 * unit(rng);
  const BoundaryMode modes[] = {BoundaryMode::dirichlet, BoundaryMode::extrapolation, BoundaryMode::wall};
  solver.boundary.left = modes[rng() % 3];
  solver.boundary.left_value = unit(rng) < 0.2 ? std::round(unit(rng)) : unit(rng);
  solver.boundary.right = modes[1 + rng() % 2];
  const auto law = unit(rng) < 0.5 ? VelocityLaw::linear() : VelocityLaw::quadratic();

  RandomCase c{make_setup(g, law, ramps, discretize_convective(ConvectiveKernel(eta), g.dx),
                          discretize_reactive(ReactiveKernel(eta, delta), g.dx), solver),
               StateField{g, std::vector<double>(static_cast<std::size_t>(n)), 0.0}};
  for (auto& v : c.state.rho) {
    const double u = unit(rng);
    v = u < 0.15 ? 0.0 : u > 0.85 ? 1.0 : unit(rng);
  }
  return c;
}

TEST(Properties, MaximumPrincipleOnRandomStates) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto c = random_case(rng);
    const double dt = compute_dt(c.state, c.setup);
    StepResult r;
    ASSERT_NO_THROW(r = step(c.state, dt, c.setup)) << "trial " << trial;
    for (double v : r.state.rho) {
      ASSERT_GE(v, -kDensityTolerance) << "trial " << trial;
      ASSERT_LE(v, 1.0 + kDensityTolerance) << "trial " << trial;
    }
  }
}

TEST(Properties, MassLedgerBalancesEveryRandomStep) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto c = random_case(rng);
    const double dt = compute_dt(c.state, c.setup);
    const auto r = step(c.state, dt, c.setup);
    const auto& f = r.fluxes;
    const double expected = dt * (f.flux_in - f.flux_out + f.onramp_inflow - f.offramp_outflow);
    EXPECT_NEAR(total_mass(r.state) - total_mass(c.state), expected, 1e-14) << "trial " << trial;
  }
}

TEST(Properties, KernelWeightsAreProbabilityVectors) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double eta = 0.01 + unit(rng);
    const double delta = eta * (2.0 * unit(rng) - 1.0);
    const double dx = 0.001 + 0.2 * unit(rng);
    for (const auto& w : {discretize_convective(ConvectiveKernel(eta), dx),
                          discretize_reactive(ReactiveKernel(eta, delta), dx)}) {
      double sum = 0.0;
      for (double x : w.weights) {
        ASSERT_GE(x, 0.0);
        sum += x;
      }
      ASSERT_NEAR(sum, 1.0, 1e-14) << "eta=" << eta << " delta=" << delta << " dx=" << dx;
      if (w.source == KernelKind::reactive) {
        ASSERT_LE(w.offset_lo * dx, delta - eta + 1e-9 * dx);
        ASSERT_GE((w.offset_hi() + 1) * dx, delta + eta - 1e-9 * dx);
      }
    }
  }
}

TEST(Properties, KernelDistanceIsAMetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dx = 0.01;
  for (int trial = 0; trial < 200; ++trial) {
    auto draw = [&] {
      const double eta = 0.05 + 0.5 * unit(rng);
      return discretize_reactive(ReactiveKernel(eta, eta * (2.0 * unit(rng) - 1.0)), dx);
    };
    const auto a = draw(), b = draw(), c = draw();
    EXPECT_NEAR(kernel_l1_distance(a, b), kernel_l1_distance(b, a), 1e-15);
    EXPECT_LE(kernel_l1_distance(a, c), kernel_l1_distance(a, b) + kernel_l1_distance(b, c) + 1e-14);
    EXPECT_LE(kernel_l1_distance(a, b), 2.0 + 1e-14);
  }
}

TEST(Properties, ShortRandomRunsStayAdmissible) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_case(rng);
    c.setup.solver.t_final = 0.2;
    Trajectory traj;
    ASSERT_NO_THROW(traj = simulate(c.state, c.setup)) << "trial " << trial;
    EXPECT_EQ(traj.final_state.time, 0.2);
  }
}

}  // namespace
}  // namespace rampflow
