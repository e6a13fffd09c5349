#include "rampflow/commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "rampflow/csv.hpp"
#include "rampflow/error.hpp"
#include "rampflow/experiments.hpp"
#include "rampflow/scenario.hpp"

namespace rampflow {
namespace {

using nlohmann::ordered_json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

ordered_json constants_json(const TheoremConstants& c) {
  return ordered_json{{"L_vel", c.L_vel}, {"Q_T", c.Q_T},         {"H", c.H},
                      {"rho0_l1", c.rho0_l1}, {"horizon", c.horizon}, {"r_T", c.r_T},
                      {"R1_upper_T", c.R1_upper(c.horizon)}};
}

void write_constants_csv(const std::filesystem::path& path, const TheoremConstants& c) {
  auto file = open_output(path);
  CsvWriter csv(file);
  csv.header({"name", "value"});
  const ordered_json values = constants_json(c);
  for (const auto& [name, value] : values.items()) {
    csv << name << value.get<double>();
    csv.end_row();
  }
}

ordered_json simulate_command(const Scenario& scenario, const RunOptions& options,
                              std::ostream& out) {
  const Trajectory traj = simulate(scenario.initial, scenario.setup);
  {
    auto file = open_output(options.out_dir / "snapshots.csv");
    CsvWriter csv(file);
    csv.header({"t", "j", "x", "rho"});
    for (const auto& snap : traj.snapshots) {
      for (int j = 0; j < snap.grid.n_cells; ++j) {
        csv << snap.time << j << snap.grid.center(j) << snap.rho[j];
        csv.end_row();
      }
    }
  }
  {
    auto file = open_output(options.out_dir / "diagnostics.csv");
    CsvWriter csv(file);
    csv.header({"step", "t", "dt", "tv", "mass", "flux_in", "flux_out", "onramp_inflow",
                "offramp_outflow", "congestion"});
    for (const auto& r : traj.steps) {
      csv << r.step << r.t << r.dt << r.tv << r.mass << r.fluxes.flux_in << r.fluxes.flux_out
          << r.fluxes.onramp_inflow << r.fluxes.offramp_outflow << r.congestion;
      csv.end_row();
    }
  }
  const TheoremConstants constants = theorem_constants(scenario);
  const MassLedger ledger = mass_ledger(traj);
  const TvBoundCheck tv = check_tv_bound(traj, constants);
  const double J = functional_J(traj);
  const double Psi = functional_Psi(traj, scenario.config.functional.a, scenario.config.functional.b);
  {
    auto file = open_output(options.out_dir / "functionals.csv");
    CsvWriter csv(file);
    csv.header({"J", "Psi", "tv_final", "mass_final", "mass_max_residual", "mass_drift",
                "tv_bound_min_margin", "tv_bound_violations"});
    csv << J << Psi << total_variation(traj.final_state) << total_mass(traj.final_state)
        << ledger.max_abs_residual << ledger.cumulative_drift << tv.min_margin << tv.violations;
    csv.end_row();
  }
  out << "simulate steps=" << traj.steps.size() << " t=" << format_double(traj.final_state.time)
      << " J=" << format_double(J) << " Psi=" << format_double(Psi) << '\n';
  return ordered_json{{"steps", traj.steps.size()},
                      {"snapshots", traj.snapshots.size()},
                      {"J", J},
                      {"Psi", Psi},
                      {"mass_max_residual", ledger.max_abs_residual},
                      {"mass_cumulative_drift", ledger.cumulative_drift},
                      {"tv_bound_holds", tv.holds},
                      {"tv_bound_min_margin", tv.min_margin}};
}

ordered_json sweep_command(const ScenarioConfig& config, const RunOptions& options,
                           std::ostream& out) {
  const SweepResult result = delta_sweep(sweep_spec_from(config), options.workers);
  {
    auto file = open_output(options.out_dir / "sweep.csv");
    CsvWriter csv(file);
    csv.header({"delta", "J", "Psi", "tv_final", "psi_argmin", "j_argmin"});
    for (const auto& r : result.rows) {
      csv << r.delta << r.J << r.Psi << r.tv_final << (r.psi_argmin ? 1 : 0) << (r.j_argmin ? 1 : 0);
      csv.end_row();
    }
  }
  out << "sweep argmin_psi=" << format_double(result.psi_argmin_delta)
      << (result.psi_tie ? " (tie)" : "") << " argmin_J=" << format_double(result.j_argmin_delta)
      << (result.j_tie ? " (tie)" : "") << '\n';
  ordered_json timing = ordered_json::array();
  for (const auto& r : result.rows) timing.push_back({{"delta", r.delta}, {"runtime_s", r.runtime_s}});
  return ordered_json{{"psi_argmin_delta", result.psi_argmin_delta},
                      {"psi_tie", result.psi_tie},
                      {"j_argmin_delta", result.j_argmin_delta},
                      {"j_tie", result.j_tie},
                      {"runtime_s", timing}};
}

ordered_json stability_command(const Scenario& scenario, const RunOptions& options,
                               std::ostream& out) {
  const ScenarioConfig& config = scenario.config;
  const PerturbationSpec spec = perturbation_spec_from(config);
  const StabilityReport report = stability_experiment(config, spec, options.workers);
  const TheoremConstants constants = theorem_constants(scenario);
  const double c_surrogate = config.stability->c_surrogate.value_or(constants.H);
  const auto& interval = spec.channel == PerturbationChannel::q_off ? config.ramp.off_interval
                                                                    : config.ramp.on_interval;
  const double ramp_length = interval ? interval->length() : 0.0;
  const auto envelope = lipschitz_envelope_check(report, constants, c_surrogate, ramp_length);
  {
    auto file = open_output(options.out_dir / "stability.csv");
    CsvWriter csv(file);
    csv.header({"channel", "epsilon", "input_distance", "output_distance", "ratio"});
    for (const auto& r : report.rows) {
      csv << to_string(report.channel) << r.epsilon << r.input_distance << r.output_distance
          << r.ratio;
      csv.end_row();
    }
  }
  {
    auto file = open_output(options.out_dir / "envelope.csv");
    CsvWriter csv(file);
    csv.header({"epsilon", "output_distance", "bound", "margin", "pass"});
    for (const auto& r : envelope) {
      csv << r.epsilon << r.output_distance << r.bound << r.margin << (r.pass ? 1 : 0);
      csv.end_row();
    }
  }
  out << "stability channel=" << to_string(report.channel) << " slope=" << format_double(report.slope)
      << " r_squared=" << format_double(report.r_squared) << '\n';
  return ordered_json{{"channel", to_string(report.channel)},
                      {"slope", report.slope},
                      {"r_squared", report.r_squared},
                      {"r_squared_centered", report.r_squared_centered},
                      {"c_surrogate", c_surrogate},
                      {"ramp_length", ramp_length},
                      {"envelope_note", "pass/fail against the surrogate constant is a sanity "
                                        "envelope, not a proof check"}};
}

ordered_json convergence_command(const ScenarioConfig& config, const RunOptions& options,
                                 std::ostream& out) {
  if (!config.convergence) throw ConfigError("convergence", "section is required for a convergence run");
  const auto rows = convergence_study(config, config.convergence->n_cells,
                                      config.convergence->reference_factor, options.workers);
  auto file = open_output(options.out_dir / "convergence.csv");
  CsvWriter csv(file);
  csv.header({"dx", "l1_error", "observed_order"});
  for (const auto& r : rows) {
    csv << r.dx << r.l1_error << r.observed_order.value_or(std::numeric_limits<double>::quiet_NaN());
    csv.end_row();
  }
  const auto& last = rows.back();
  out << "convergence finest_dx=" << format_double(last.dx)
      << " order=" << format_double(last.observed_order.value_or(std::numeric_limits<double>::quiet_NaN()))
      << '\n';
  return ordered_json{{"reference_n_cells",
                       config.convergence->reference_factor * config.convergence->n_cells.back()}};
}

ordered_json constants_command(const Scenario& scenario, const RunOptions& options,
                               std::ostream& out) {
  const TheoremConstants c = theorem_constants(scenario);
  write_constants_csv(options.out_dir / "constants.csv", c);
  out << "L_vel=" << format_double(c.L_vel) << " Q_T=" << format_double(c.Q_T)
      << " H=" << format_double(c.H) << " r_T=" << format_double(c.r_T)
      << " rate_basis=" << to_string(scenario.config.ramp.basis) << '\n';
  return {};
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::simulate: return "simulate";
    case Command::sweep: return "sweep";
    case Command::stability: return "stability";
    case Command::convergence: return "convergence";
    case Command::constants: return "constants";
  }
  return "simulate";
}

Command command_from_name(std::string_view name) {
  for (auto c : {Command::simulate, Command::sweep, Command::stability, Command::convergence,
                 Command::constants}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("command", "must be one of simulate, sweep, stability, convergence, constants");
}

int run_command(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
                std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(options.out_dir);
    const Scenario scenario = build_scenario(config);

    ordered_json result;
    switch (options.command) {
      case Command::simulate: result = simulate_command(scenario, options, out); break;
      case Command::sweep: result = sweep_command(config, options, out); break;
      case Command::stability: result = stability_command(scenario, options, out); break;
      case Command::convergence: result = convergence_command(config, options, out); break;
      case Command::constants: result = constants_command(scenario, options, out); break;
    }

    const std::string normalized = normalized_config(config);
    open_output(options.out_dir / "config.normalized.ini") << normalized;

    const auto& bc = scenario.setup.solver.boundary;
    ordered_json meta{
        {"command", to_string(options.command)},
        {"scheme", kSchemeId},
        {"boundary",
         {{"left", to_string(bc.left)}, {"left_value", bc.left_value}, {"right", to_string(bc.right)}}},
        {"rate_basis", to_string(config.ramp.basis)},
        {"kernel_l1_convention", "sum_k |gamma_k - gamma~_k|, cell width folded into the weights"},
        {"r1_convention", "R1 upper bound: ||rho0||_1 plus the integrated on-ramp inflow"},
        {"psi_quadrature", "per accepted step, left endpoint"},
        {"workers", options.workers},
        {"wall_time_s",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
        {"constants", constants_json(theorem_constants(scenario))},
        {"result", result},
        {"normalized_config", normalized}};
    open_output(options.out_dir / "metadata.json") << meta.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << format_error_line(e) << '\n';
    return exit_code_for(e);
  }
}

std::string format_error_line(const std::exception& error) {
  const auto* lib = dynamic_cast<const Error*>(&error);
  const std::string_view kind = lib ? lib->kind() : std::string_view("internal_error");
  std::string message;
  for (char ch : std::string_view(error.what())) {
    if (ch == '"' || ch == '\\') message += '\\';
    message += ch == '\n' ? ' ' : ch;
  }
  return "error kind=" + std::string(kind) + " message=\"" + message + "\"";
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const DomainError*>(&error)) return 3;
  if (dynamic_cast<const InvariantViolation*>(&error)) return 4;
  return 1;
}

std::size_t workers_from_env(std::size_t fallback) {
  const char* value = std::getenv("RAMPFLOW_WORKERS");
  if (!value || !*value) return fallback;
  std::size_t parsed = 0;
  const std::string_view text(value);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), parsed);
  if (ec != std::errc() || ptr != text.data() + text.size() || parsed == 0) {
    throw ConfigError("RAMPFLOW_WORKERS", "must be a positive integer");
  }
  return parsed;
}

}  // namespace rampflow
