#include "rampflow/scenario.hpp"

#include <cmath>
#include <numbers>

namespace rampflow {
namespace {

// Exact average of value + amplitude exp(-((x - c)/w)^2) over [a, b].
double gaussian_average(const ScenarioConfig::InitialBlock& ic, double a, double b) {
  const double half_sqrt_pi = 0.5 * std::sqrt(std::numbers::pi);
  const double za = (a - ic.center) / ic.width;
  const double zb = (b - ic.center) / ic.width;
  const double integral = ic.amplitude * ic.width * half_sqrt_pi * (std::erf(zb) - std::erf(za));
  return ic.value + integral / (b - a);
}

RateSchedule per_length(const RateSchedule& q, const std::optional<Interval>& iv, RateBasis basis) {
  if (basis == RateBasis::per_length || !iv) return q;
  return q.scaled(1.0 / iv->length());
}

}  // namespace

StateField initial_state(const ScenarioConfig& config, const Grid& grid) {
  StateField state{grid, std::vector<double>(grid.n_cells), 0.0};
  for (int j = 0; j < grid.n_cells; ++j) {
    state.rho[j] = config.initial.profile == InitialProfile::constant
                       ? config.initial.value
                       : gaussian_average(config.initial, grid.left_edge(j), grid.left_edge(j + 1));
  }
  return state;
}

RampConfig effective_ramps(const ScenarioConfig& config) {
  RampConfig ramps;
  ramps.on_interval = config.ramp.on_interval;
  ramps.off_interval = config.ramp.off_interval;
  ramps.q_on = per_length(config.ramp.q_on, config.ramp.on_interval, config.ramp.basis);
  ramps.q_off = per_length(config.ramp.q_off, config.ramp.off_interval, config.ramp.basis);
  if (!ramps.on_interval) ramps.q_on = RateSchedule::constant(0.0);
  if (!ramps.off_interval) ramps.q_off = RateSchedule::constant(0.0);
  return ramps;
}

Scenario build_scenario(const ScenarioConfig& config) {
  validate(config);
  const Grid grid = build_grid(config.grid.x_min, config.grid.x_max, config.grid.n_cells);
  const ConvectiveKernel convective(config.kernel.eta_convective);
  const ReactiveKernel reactive(config.kernel.eta, config.kernel.delta);
  const RampConfig ramps = effective_ramps(config);

  SolverConfig solver;
  solver.cfl = config.solver.cfl;
  solver.t_final = config.solver.t_final;
  solver.snapshot_stride = config.solver.snapshot_stride;
  solver.boundary.left = config.solver.left_boundary;
  solver.boundary.left_value = config.effective_left_value();
  solver.boundary.right = config.solver.right_boundary;

  SimulationSetup setup = make_setup(grid, VelocityLaw::from_name(config.law.name), ramps,
                                     discretize_convective(convective, grid.dx),
                                     discretize_reactive(reactive, grid.dx), solver,
                                     Interval{config.functional.a, config.functional.b});
  return Scenario{config, convective, reactive, std::move(setup), initial_state(config, grid)};
}

TheoremConstants theorem_constants(const Scenario& scenario) {
  return theorem_constants(scenario.setup.law, scenario.setup.ramps, scenario.convective_kernel,
                           scenario.initial, scenario.config.solver.t_final);
}

}  // namespace rampflow
