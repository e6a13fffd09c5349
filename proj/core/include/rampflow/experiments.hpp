#pragma once

#include <optional>
#include <vector>

#include "rampflow/config.hpp"
#include "rampflow/diagnostics.hpp"
#include "rampflow/scenario.hpp"

namespace rampflow {

// ---------------------------------------------------------------------------
// Merge-look offset sweep
// ---------------------------------------------------------------------------

struct SweepSpec {
  ScenarioConfig base;
  std::vector<double> deltas;
  Interval window{-1.0, 4.0};
};

struct SweepRow {
  double delta = 0.0;
  double J = 0.0;
  double Psi = 0.0;
  double tv_final = 0.0;
  double runtime_s = 0.0;
  bool psi_argmin = false;
  bool j_argmin = false;
};

struct SweepResult {
  /// Sorted by delta; duplicated deltas give duplicated rows.
  std::vector<SweepRow> rows;
  double psi_argmin_delta = 0.0;
  double j_argmin_delta = 0.0;
  /// Another distinct delta matched the minimum (ties go to the smaller delta).
  bool psi_tie = false;
  bool j_tie = false;
};

/// Uses base's sweep block and functional window.
SweepSpec sweep_spec_from(const ScenarioConfig& base);
SweepResult delta_sweep(const SweepSpec& spec, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// L1 stability with respect to data, ramp rates and kernel
// ---------------------------------------------------------------------------

struct PerturbationSpec {
  PerturbationChannel channel = PerturbationChannel::kernel_delta;
  std::vector<double> epsilons;
  /// initial_datum: cos^2 bump centred here, of this half-width.
  double bump_center = 0.0;
  double bump_width = 0.25;
};

PerturbationSpec perturbation_spec_from(const ScenarioConfig& base);

/// The perturbed scenario for one magnitude. Configuration channels move the
/// matching key by epsilon (in the configured rate units for q_on and q_off);
/// initial_datum adds epsilon times a cos^2 bump to the initial cell averages
/// and clamps to [0, 1]. Throws ConfigError if the result is not admissible.
Scenario perturb(const ScenarioConfig& base, const PerturbationSpec& spec, double epsilon);

struct StabilityRow {
  double epsilon = 0.0;
  /// The matching input term of the stability estimate: ||rho0 - rho0~||_1,
  /// ||q - q~||_{L1(0,T)} in source-rate units, or the kernel L1 distance.
  double input_distance = 0.0;
  double output_distance = 0.0;
  /// output / input; NaN on the epsilon = 0 self-test row.
  double ratio = 0.0;
};

struct StabilityReport {
  PerturbationChannel channel = PerturbationChannel::kernel_delta;
  double horizon = 0.0;
  std::vector<StabilityRow> rows;
  /// Least-squares slope of output against input through the origin.
  double slope = 0.0;
  /// 1 - SS_res / sum y^2, the usual R^2 for a fit without intercept.
  double r_squared = 0.0;
  /// 1 - SS_res / sum (y - mean)^2, reported for reference.
  double r_squared_centered = 0.0;
};

StabilityReport stability_experiment(const ScenarioConfig& base, const PerturbationSpec& spec,
                                     std::size_t workers = 1);

struct EnvelopeRow {
  double epsilon = 0.0;
  double output_distance = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

/// Compares each row against e^{C T}(input term), where the rate terms carry the
/// on-ramp length as prefactor and the kernel term carries r_T.
std::vector<EnvelopeRow> lipschitz_envelope_check(const StabilityReport& report,
                                                  const TheoremConstants& constants,
                                                  double c_surrogate,
                                                  double ramp_length);

// ---------------------------------------------------------------------------
// Grid self-convergence
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  int n_cells = 0;
  double dx = 0.0;
  double l1_error = 0.0;
  /// log(e_{i-1}/e_i)/log(dx_{i-1}/dx_i); empty on the first row or when an
  /// error is at roundoff level.
  std::optional<double> observed_order;
};

/// Runs each grid and a reference with reference_factor * max(n_cells) cells,
/// restricting the reference by cell averaging. n_cells must be increasing
/// and divide the reference size.
std::vector<ConvergenceRow> convergence_study(const ScenarioConfig& base,
                                              const std::vector<int>& n_cells,
                                              int reference_factor = 4,
                                              std::size_t workers = 1);

/// Averages blocks of `factor` fine cells.
std::vector<double> restrict_average(const std::vector<double>& fine, int factor);

}  // namespace rampflow
