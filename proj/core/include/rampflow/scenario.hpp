#pragma once

#include "rampflow/config.hpp"
#include "rampflow/diagnostics.hpp"
#include "rampflow/fv_solver.hpp"

namespace rampflow {

/// A configuration turned into solver inputs.
struct Scenario {
  ScenarioConfig config;
  ConvectiveKernel convective_kernel{0.5};
  ReactiveKernel reactive_kernel{0.5, 0.0};
  SimulationSetup setup;
  StateField initial;
};

Scenario build_scenario(const ScenarioConfig& config);

/// Cell averages of the configured initial profile.
StateField initial_state(const ScenarioConfig& config, const Grid& grid);

/// Source rates per unit length after applying the rate basis.
RampConfig effective_ramps(const ScenarioConfig& config);

TheoremConstants theorem_constants(const Scenario& scenario);

}  // namespace rampflow
