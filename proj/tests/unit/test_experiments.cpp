#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "rampflow/error.hpp"
#include "rampflow/experiments.hpp"
#include "rampflow/worker_pool.hpp"

namespace rampflow {
namespace {

// Coarse, short version of the bundled ramp scenario.
ScenarioConfig small_config() {
  auto c = load_config("single_onramp");
  c.grid.n_cells = 200;
  c.solver.t_final = 1.5;
  return c;
}

TEST(WorkerPool, RunsEveryIndexOnceAndRethrowsLowestFailure) {
  std::vector<int> hits(50, 0);
  run_indexed(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  try {
    run_indexed(10, 3, [](std::size_t i) {
      if (i == 7 || i == 4) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "4");
  }
  run_indexed(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Sweep, DuplicateDeltasGiveIdenticalRows) {
  auto spec = sweep_spec_from(small_config());
  spec.deltas = {0.1, 0.1, -0.2};
  const auto r = delta_sweep(spec, 2);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].delta, -0.2);
  EXPECT_EQ(r.rows[1].J, r.rows[2].J);
  EXPECT_EQ(r.rows[1].Psi, r.rows[2].Psi);
}

TEST(Sweep, InvariantUnderReordering) {
  auto spec = sweep_spec_from(small_config());
  spec.deltas = {-0.3, 0.0, 0.2, 0.4};
  const auto a = delta_sweep(spec, 1);
  std::reverse(spec.deltas.begin(), spec.deltas.end());
  const auto b = delta_sweep(spec, 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].delta, b.rows[i].delta);
    EXPECT_EQ(a.rows[i].J, b.rows[i].J);
    EXPECT_EQ(a.rows[i].Psi, b.rows[i].Psi);
    EXPECT_EQ(a.rows[i].psi_argmin, b.rows[i].psi_argmin);
  }
  EXPECT_EQ(a.psi_argmin_delta, b.psi_argmin_delta);
  const auto flagged = std::count_if(a.rows.begin(), a.rows.end(), [](const SweepRow& r) { return r.psi_argmin; });
  EXPECT_EQ(flagged, 1);
}

TEST(Sweep, TiesGoToSmallerDeltaAndAreFlagged) {
  auto c = small_config();
  c.ramp.on_interval.reset();
  auto spec = sweep_spec_from(c);
  spec.deltas = {0.3, -0.1, 0.2};
  const auto r = delta_sweep(spec);
  EXPECT_EQ(r.psi_argmin_delta, -0.1);
  EXPECT_TRUE(r.psi_tie);
  EXPECT_TRUE(r.rows[0].psi_argmin);
}

TEST(Sweep, RequiresSweepBlock) {
  auto c = small_config();
  c.sweep.reset();
  EXPECT_THROW(sweep_spec_from(c), ConfigError);
}

TEST(Perturb, ChannelsMoveTheRightKnob) {
  const auto base = small_config();
  PerturbationSpec spec;
  spec.channel = PerturbationChannel::kernel_delta;
  EXPECT_DOUBLE_EQ(perturb(base, spec, 0.05).config.kernel.delta, 0.15);
  spec.channel = PerturbationChannel::kernel_shape;
  EXPECT_DOUBLE_EQ(perturb(base, spec, 0.05).config.kernel.eta, 0.55);
  spec.channel = PerturbationChannel::q_on;
  EXPECT_DOUBLE_EQ(perturb(base, spec, 0.05).config.ramp.q_on.at(0.0), 1.25);
  spec.channel = PerturbationChannel::q_off;
  EXPECT_THROW(perturb(base, spec, 0.05), ConfigError);
  spec.channel = PerturbationChannel::kernel_delta;
  EXPECT_THROW(perturb(base, spec, 0.45), ConfigError);
}

TEST(Perturb, InitialBumpIsLocalisedClampedAndExact) {
  auto base = small_config();
  PerturbationSpec spec;
  spec.channel = PerturbationChannel::initial_datum;
  spec.bump_center = 0.0;
  spec.bump_width = 0.25;
  const auto p = perturb(base, spec, 0.1);
  const auto& g = p.initial.grid;
  double added = 0.0;
  for (int j = 0; j < g.n_cells; ++j) {
    const double d = p.initial.rho[static_cast<std::size_t>(j)] - 0.3;
    if (std::abs(g.center(j)) > 0.25 + g.dx) EXPECT_EQ(d, 0.0) << j;
    EXPECT_GE(d, 0.0);
    added += d * g.dx;
  }
  EXPECT_NEAR(added, 0.1 * 0.25, 1e-14);
  const auto big = perturb(base, spec, 5.0);
  EXPECT_EQ(*std::max_element(big.initial.rho.begin(), big.initial.rho.end()), 1.0);
  spec.bump_center = 3.9;
  EXPECT_THROW(perturb(base, spec, 0.1), ConfigError);
}

TEST(Stability, IdentityRowIsZeroAndFitIsConsistent) {
  PerturbationSpec spec;
  spec.channel = PerturbationChannel::kernel_delta;
  spec.epsilons = {0.0, 0.025, 0.05};
  const auto r = stability_experiment(small_config(), spec, 2);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].output_distance, 0.0);
  EXPECT_EQ(r.rows[0].input_distance, 0.0);
  EXPECT_TRUE(std::isnan(r.rows[0].ratio));
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GT(r.rows[i].ratio, 0.0);
    EXPECT_TRUE(std::isfinite(r.rows[i].ratio));
    sxy += r.rows[i].input_distance * r.rows[i].output_distance;
    sxx += r.rows[i].input_distance * r.rows[i].input_distance;
  }
  EXPECT_NEAR(r.slope, sxy / sxx, 1e-15);
  EXPECT_GT(r.slope, 0.0);
  EXPECT_LE(r.r_squared, 1.0);
  EXPECT_EQ(r.horizon, 1.5);
}

TEST(Stability, RateInputIsL1NormOverHorizon) {
  PerturbationSpec spec;
  spec.channel = PerturbationChannel::q_on;
  spec.epsilons = {0.02};
  const auto r = stability_experiment(small_config(), spec);
  // ramp_flow basis: +0.02 of ramp flow is +0.2 per unit length.
  EXPECT_NEAR(r.rows[0].input_distance, 0.2 * 1.5, 1e-12);
}

TEST(Stability, ZeroInputDistanceIsAnError) {
  auto c = small_config();
  c.initial.value = 1.0;
  c.solver.left_value = 1.0;
  PerturbationSpec spec;
  spec.channel = PerturbationChannel::initial_datum;
  spec.epsilons = {0.1};
  EXPECT_THROW(stability_experiment(c, spec), DomainError);
}

TEST(Envelope, PassesGenerouslyAndFailsNegativeControl) {
  PerturbationSpec spec;
  spec.channel = PerturbationChannel::kernel_delta;
  spec.epsilons = {0.0, 0.05};
  const auto base = small_config();
  const auto report = stability_experiment(base, spec);
  const auto constants = theorem_constants(build_scenario(base));
  const auto ok = lipschitz_envelope_check(report, constants, constants.H, 0.1);
  ASSERT_EQ(ok.size(), 2u);
  EXPECT_TRUE(ok[0].pass);
  EXPECT_EQ(ok[0].bound, 0.0);
  EXPECT_TRUE(ok[1].pass);
  EXPECT_GT(ok[1].margin, 0.0);
  EXPECT_NEAR(ok[1].bound, std::exp(constants.H * 1.5) * constants.r_T * report.rows[1].input_distance,
              1e-9 * ok[1].bound);
  // The measured maps contract in L1, so a failing row has to be staged.
  auto staged = report;
  staged.rows[1].output_distance = 2.0 * constants.r_T * staged.rows[1].input_distance;
  const auto tiny = lipschitz_envelope_check(staged, constants, 1e-6, 0.1);
  EXPECT_TRUE(tiny[0].pass);
  EXPECT_FALSE(tiny[1].pass);
  EXPECT_LT(tiny[1].margin, 0.0);
  EXPECT_THROW(lipschitz_envelope_check(report, constants, 0.0, 0.1), ConfigError);
}

TEST(Convergence, RestrictAverage) {
  EXPECT_EQ(restrict_average({1, 3, 5, 7}, 2), (std::vector<double>{2, 6}));
  EXPECT_THROW(restrict_average({1, 2, 3}, 2), DomainError);
}

TEST(Convergence, ConstantStateHasRoundoffErrorsAndNoOrder) {
  auto c = small_config();
  c.ramp.on_interval.reset();
  const auto rows = convergence_study(c, {25, 50, 100}, 4, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_LE(r.l1_error, 1e-13);
    EXPECT_FALSE(r.observed_order);
  }
  EXPECT_DOUBLE_EQ(rows[0].dx, 0.2);
}

TEST(Convergence, RejectsNonNestedOrUnsortedGrids) {
  const auto c = small_config();
  EXPECT_THROW(convergence_study(c, {30, 50}, 4), ConfigError);
  EXPECT_THROW(convergence_study(c, {50, 25}, 4), ConfigError);
  EXPECT_THROW(convergence_study(c, {50}, 4), ConfigError);
}

TEST(Convergence, SmoothProblemConvergesAtFirstOrder) {
  auto c = load_config("smooth_no_ramp");
  c.solver.t_final = 0.5;
  const auto rows = convergence_study(c, {50, 100, 200}, 4, 2);
  EXPECT_GT(rows[0].l1_error, rows[1].l1_error);
  EXPECT_GT(rows[1].l1_error, rows[2].l1_error);
  ASSERT_TRUE(rows[2].observed_order);
  EXPECT_GT(*rows[2].observed_order, 0.8);
}

}  // namespace
}  // namespace rampflow
