#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rampflow/mesh_kernel.hpp"
#include "rampflow/traffic_model.hpp"

namespace rampflow {

/// Identifier written into run metadata.
inline constexpr std::string_view kSchemeId =
    "upwind-nonlocal-v1 (first-order upwind flux rho_{j} v(R_{j+1/2}), "
    "explicit Euler sources, interface-anchored convective window)";

enum class BoundaryMode { dirichlet, extrapolation, wall };

std::string_view to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_name(std::string_view name);

/// Ghost-cell policy. Kernel windows that run past an edge see the Dirichlet
/// value on the left when left == dirichlet, density 1 behind a right wall,
/// and a copy of the edge cell otherwise. `wall` closes the edge to flux.
struct BoundaryConditions {
  BoundaryMode left = BoundaryMode::dirichlet;
  double left_value = 0.0;
  BoundaryMode right = BoundaryMode::extrapolation;
};

struct SolverConfig {
  double cfl = 0.9;
  double t_final = 1.0;
  BoundaryConditions boundary;
  /// A snapshot is kept every `snapshot_stride` accepted steps.
  int snapshot_stride = 1;
};

void validate(const SolverConfig& config);

struct StateField {
  Grid grid;
  std::vector<double> rho;
  double time = 0.0;
};

/// Everything a run needs besides the initial state. Immutable once built and
/// safe to share between concurrent simulations.
struct SimulationSetup {
  Grid grid;
  VelocityLaw law = VelocityLaw::linear();
  RampConfig ramps;
  DiscreteKernelWeights convective;
  DiscreteKernelWeights reactive;
  IndicatorField on_indicator;
  IndicatorField off_indicator;
  SolverConfig solver;
  /// Window whose congestion integrand is recorded every step; the whole
  /// grid when absent.
  std::optional<Interval> congestion_window;
};

/// Assembles a setup and derives the indicator fields from the ramps.
SimulationSetup make_setup(const Grid& grid, const VelocityLaw& law,
                           const RampConfig& ramps,
                           const DiscreteKernelWeights& convective,
                           const DiscreteKernelWeights& reactive,
                           const SolverConfig& solver,
                           std::optional<Interval> congestion_window = std::nullopt);

/// sum_k w_k rho^_{j + k} with rho^ the boundary-extended state.
double nonlocal_sample(const StateField& state, const DiscreteKernelWeights& weights,
                       int j, const BoundaryConditions& boundary);

/// Time step at t = state.time, clipped so the run ends on t_final.
double compute_dt(const StateField& state, const SimulationSetup& setup);

/// Rates over one step, all evaluated on the pre-step state.
struct StepFluxes {
  double flux_in = 0.0;          ///< F at the left edge
  double flux_out = 0.0;         ///< F at the right edge
  double onramp_inflow = 0.0;    ///< dx * sum_j S_on,j
  double offramp_outflow = 0.0;  ///< dx * sum_j S_off,j
};

struct StepResult {
  StateField state;
  StepFluxes fluxes;
};

/// One explicit step. Throws InvariantViolation if any cell leaves
/// [-1e-12, 1 + 1e-12].
StepResult step(const StateField& state, double dt, const SimulationSetup& setup);

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double tv = 0.0;
  double mass = 0.0;
  StepFluxes fluxes;
  /// dx * sum_j coverage_j phi(rho_j) over the congestion window.
  double congestion = 0.0;
};

struct Trajectory {
  Grid grid;
  std::vector<StateField> snapshots;
  /// One record per accepted step, describing the state at the step's start.
  std::vector<StepRecord> steps;
  StateField final_state;
  std::optional<Interval> congestion_window;
};

Trajectory simulate(const StateField& initial, const SimulationSetup& setup);

}  // namespace rampflow
