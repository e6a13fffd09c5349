#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rampflow/fv_solver.hpp"
#include "rampflow/traffic_model.hpp"

namespace rampflow {

/// How the configured ramp rates map onto the source term. `per_length`
/// uses them as the factor in front of the ramp indicator; `ramp_flow`
/// treats them as the ramp's total flow and spreads it over the ramp length.
enum class RateBasis { per_length, ramp_flow };

enum class InitialProfile { constant, gaussian };

enum class PerturbationChannel { initial_datum, q_on, q_off, kernel_delta, kernel_shape };

std::string_view to_string(RateBasis basis);
std::string_view to_string(InitialProfile profile);
std::string_view to_string(PerturbationChannel channel);
PerturbationChannel perturbation_channel_from_name(std::string_view name);

/// Parsed and validated scenario file.
struct ScenarioConfig {
  struct GridBlock {
    double x_min = -1.0;
    double x_max = 4.0;
    int n_cells = 1000;
  } grid;

  struct InitialBlock {
    InitialProfile profile = InitialProfile::constant;
    double value = 0.3;
    /// gaussian: value + amplitude exp(-((x - center)/width)^2)
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
  } initial;

  struct KernelBlock {
    double eta = 0.5;
    double delta = 0.0;
    double eta_convective = 0.5;
  } kernel;

  struct RampBlock {
    std::optional<Interval> on_interval;
    RateSchedule q_on;
    std::optional<Interval> off_interval;
    RateSchedule q_off;
    RateBasis basis = RateBasis::per_length;
  } ramp;

  struct LawBlock {
    std::string name = "linear";
  } law;

  struct SolverBlock {
    double cfl = 0.9;
    double t_final = 1.0;
    BoundaryMode left_boundary = BoundaryMode::dirichlet;
    /// Defaults to the initial profile at x_min.
    std::optional<double> left_value;
    BoundaryMode right_boundary = BoundaryMode::extrapolation;
    int snapshot_stride = 100;
  } solver;

  struct FunctionalBlock {
    double a = -1.0;
    double b = 4.0;
  } functional;

  struct SweepBlock {
    std::vector<double> deltas;
  };
  std::optional<SweepBlock> sweep;

  struct StabilityBlock {
    PerturbationChannel channel = PerturbationChannel::kernel_delta;
    std::vector<double> epsilons;
    double bump_center = 0.0;
    double bump_width = 0.25;
    /// Growth constant for the envelope check; theorem constant H when absent.
    std::optional<double> c_surrogate;
  };
  std::optional<StabilityBlock> stability;

  struct ConvergenceBlock {
    std::vector<int> n_cells;
    int reference_factor = 4;
  };
  std::optional<ConvergenceBlock> convergence;

  /// Initial density at position x.
  double initial_density(double x) const;
  /// Left Dirichlet value after defaults.
  double effective_left_value() const;
};

/// Parses the INI-style scenario format. `origin` names the source in errors.
ScenarioConfig parse_config_text(std::string_view text, std::string_view origin = "<string>");
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Resolves a bundled scenario name (e.g. "single_onramp") or a file path.
ScenarioConfig load_config(std::string_view name_or_path);

/// Full round-trippable echo of a configuration with every default spelled out.
std::string normalized_config(const ScenarioConfig& config);

/// Throws ConfigError naming section.key on the first violated constraint.
void validate(const ScenarioConfig& config);

std::optional<std::string_view> bundled_scenario_text(std::string_view name);
std::vector<std::string_view> bundled_scenario_names();

}  // namespace rampflow
