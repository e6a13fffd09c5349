#include "rampflow/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rampflow/csv.hpp"
#include "rampflow/error.hpp"
#include "rampflow/worker_pool.hpp"

namespace rampflow {
namespace {

// Rethrows the active library error with `context` prepended, keeping its kind.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), "(" + context + ") " +
                                     std::string(e.what()).substr(e.field().empty() ? 0 : e.field().size() + 1));
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(context + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(context + ": " + e.what());
  } catch (const Error& e) {
    throw Error(context + ": " + e.what());
  }
}

Trajectory run(const Scenario& scenario) { return simulate(scenario.initial, scenario.setup); }

// Integral over [a, b] of cos^2(pi (x - c) / (2 w)) restricted to |x - c| < w.
double bump_integral(double a, double b, double c, double w) {
  a = std::max(a, c - w);
  b = std::min(b, c + w);
  if (b <= a) return 0.0;
  const double k = std::numbers::pi / w;
  auto primitive = [&](double x) { return 0.5 * (x - c) + std::sin(k * (x - c)) / (2.0 * k); };
  return primitive(b) - primitive(a);
}

struct FitResult {
  double slope = 0.0;
  double r2 = 0.0;
  double r2_centered = 0.0;
};

FitResult fit_through_origin(const std::vector<StabilityRow>& rows) {
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.epsilon == 0.0) continue;
    sxx += r.input_distance * r.input_distance;
    sxy += r.input_distance * r.output_distance;
    syy += r.output_distance * r.output_distance;
    sy += r.output_distance;
    ++n;
  }
  FitResult fit;
  if (n == 0 || sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (const auto& r : rows) {
    if (r.epsilon == 0.0) continue;
    const double e = r.output_distance - fit.slope * r.input_distance;
    ss_res += e * e;
  }
  const double mean = sy / static_cast<double>(n);
  const double ss_tot = syy - static_cast<double>(n) * mean * mean;
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  fit.r2_centered = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

}  // namespace

SweepSpec sweep_spec_from(const ScenarioConfig& base) {
  if (!base.sweep) throw ConfigError("sweep", "section with deltas is required for a sweep");
  return SweepSpec{base, base.sweep->deltas, Interval{base.functional.a, base.functional.b}};
}

SweepResult delta_sweep(const SweepSpec& spec, std::size_t workers) {
  if (spec.deltas.size() < 2) throw ConfigError("sweep.deltas", "needs at least 2 values");
  std::vector<double> deltas = spec.deltas;
  std::stable_sort(deltas.begin(), deltas.end());

  std::vector<SweepRow> rows(deltas.size());
  run_indexed(deltas.size(), workers, [&](std::size_t i) {
    ScenarioConfig config = spec.base;
    config.kernel.delta = deltas[i];
    config.functional = {spec.window.a, spec.window.b};
    try {
      const auto start = std::chrono::steady_clock::now();
      const Scenario scenario = build_scenario(config);
      const Trajectory traj = run(scenario);
      SweepRow& row = rows[i];
      row.delta = deltas[i];
      row.J = functional_J(traj);
      row.Psi = functional_Psi(traj, spec.window.a, spec.window.b);
      row.tv_final = total_variation(traj.final_state);
      row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const Error&) {
      rethrow_with_context("sweep delta=" + format_double(deltas[i]));
    }
  });

  SweepResult result;
  auto pick = [&rows](auto value, bool SweepRow::*flag, double& argmin, bool& tie) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (value(rows[i]) < value(rows[best])) best = i;
    }
    argmin = rows[best].delta;
    rows[best].*flag = true;
    tie = std::any_of(rows.begin(), rows.end(), [&](const SweepRow& r) {
      return r.delta != argmin && value(r) == value(rows[best]);
    });
  };
  pick([](const SweepRow& r) { return r.Psi; }, &SweepRow::psi_argmin, result.psi_argmin_delta,
       result.psi_tie);
  pick([](const SweepRow& r) { return r.J; }, &SweepRow::j_argmin, result.j_argmin_delta,
       result.j_tie);
  result.rows = std::move(rows);
  return result;
}

PerturbationSpec perturbation_spec_from(const ScenarioConfig& base) {
  if (!base.stability) throw ConfigError("stability", "section is required for a stability run");
  const auto& st = *base.stability;
  return PerturbationSpec{st.channel, st.epsilons, st.bump_center, st.bump_width};
}

Scenario perturb(const ScenarioConfig& base, const PerturbationSpec& spec, double epsilon) {
  if (!(epsilon >= 0.0)) throw ConfigError("stability.epsilons", "values must be non-negative");
  ScenarioConfig config = base;
  switch (spec.channel) {
    case PerturbationChannel::kernel_delta:
      config.kernel.delta += epsilon;
      break;
    case PerturbationChannel::kernel_shape:
      config.kernel.eta += epsilon;
      break;
    case PerturbationChannel::q_on:
      if (!config.ramp.on_interval) throw ConfigError("ramp.on_interval", "is required for the q_on channel");
      config.ramp.q_on = config.ramp.q_on.shifted(epsilon);
      break;
    case PerturbationChannel::q_off:
      if (!config.ramp.off_interval) throw ConfigError("ramp.off_interval", "is required for the q_off channel");
      config.ramp.q_off = config.ramp.q_off.shifted(epsilon);
      break;
    case PerturbationChannel::initial_datum:
      break;
  }
  Scenario scenario = build_scenario(config);
  if (spec.channel == PerturbationChannel::initial_datum && epsilon > 0.0) {
    const Grid& g = scenario.initial.grid;
    const double c = spec.bump_center, w = spec.bump_width;
    if (c - w < g.x_min || c + w > g.x_max) {
      throw ConfigError("stability.bump_center", "bump must lie inside the grid");
    }
    for (int j = 0; j < g.n_cells; ++j) {
      const double avg = bump_integral(g.left_edge(j), g.left_edge(j + 1), c, w) / g.dx;
      scenario.initial.rho[j] = std::clamp(scenario.initial.rho[j] + epsilon * avg, 0.0, 1.0);
    }
  }
  return scenario;
}

StabilityReport stability_experiment(const ScenarioConfig& base, const PerturbationSpec& spec,
                                     std::size_t workers) {
  if (spec.epsilons.empty()) throw ConfigError("stability.epsilons", "needs at least one value");
  const Scenario reference = build_scenario(base);
  const double horizon = base.solver.t_final;

  // Slot 0 is the unperturbed run.
  std::vector<StateField> finals(spec.epsilons.size() + 1);
  std::vector<double> inputs(spec.epsilons.size(), 0.0);
  run_indexed(finals.size(), workers, [&](std::size_t slot) {
    if (slot == 0) {
      finals[0] = run(reference).final_state;
      return;
    }
    const double eps = spec.epsilons[slot - 1];
    try {
      const Scenario perturbed = perturb(base, spec, eps);
      double input = 0.0;
      switch (spec.channel) {
        case PerturbationChannel::initial_datum:
          input = l1_distance(reference.initial, perturbed.initial);
          break;
        case PerturbationChannel::q_on:
          input = std::abs(perturbed.setup.ramps.q_on.integral(horizon) -
                           reference.setup.ramps.q_on.integral(horizon));
          break;
        case PerturbationChannel::q_off:
          input = std::abs(perturbed.setup.ramps.q_off.integral(horizon) -
                           reference.setup.ramps.q_off.integral(horizon));
          break;
        case PerturbationChannel::kernel_delta:
        case PerturbationChannel::kernel_shape:
          input = kernel_l1_distance(reference.setup.reactive, perturbed.setup.reactive);
          break;
      }
      if (eps > 0.0 && !(input > 0.0)) {
        std::ostringstream msg;
        msg << "perturbation with epsilon=" << format_double(eps) << " on channel "
            << to_string(spec.channel) << " has zero input distance";
        throw DomainError(msg.str());
      }
      inputs[slot - 1] = input;
      finals[slot] = run(perturbed).final_state;
    } catch (const Error&) {
      rethrow_with_context("stability " + std::string(to_string(spec.channel)) +
                           " epsilon=" + format_double(eps));
    }
  });

  StabilityReport report;
  report.channel = spec.channel;
  report.horizon = horizon;
  for (std::size_t i = 0; i < spec.epsilons.size(); ++i) {
    StabilityRow row;
    row.epsilon = spec.epsilons[i];
    row.input_distance = inputs[i];
    row.output_distance = l1_distance(finals[0], finals[i + 1]);
    row.ratio = row.epsilon > 0.0 ? row.output_distance / row.input_distance
                                  : std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back(row);
  }
  const FitResult fit = fit_through_origin(report.rows);
  report.slope = fit.slope;
  report.r_squared = fit.r2;
  report.r_squared_centered = fit.r2_centered;
  return report;
}

std::vector<EnvelopeRow> lipschitz_envelope_check(const StabilityReport& report,
                                                  const TheoremConstants& constants,
                                                  double c_surrogate, double ramp_length) {
  if (!(c_surrogate > 0.0)) throw ConfigError("stability.c_surrogate", "must be positive");
  const double growth = std::exp(c_surrogate * report.horizon);
  double factor = 1.0;
  switch (report.channel) {
    case PerturbationChannel::initial_datum: factor = 1.0; break;
    case PerturbationChannel::q_on:
    case PerturbationChannel::q_off: factor = ramp_length; break;
    case PerturbationChannel::kernel_delta:
    case PerturbationChannel::kernel_shape: factor = constants.r_T; break;
  }
  std::vector<EnvelopeRow> out;
  for (const auto& r : report.rows) {
    EnvelopeRow row;
    row.epsilon = r.epsilon;
    row.output_distance = r.output_distance;
    row.bound = growth * factor * r.input_distance;
    row.margin = row.bound - r.output_distance;
    row.pass = r.output_distance <= row.bound;
    out.push_back(row);
  }
  return out;
}

std::vector<double> restrict_average(const std::vector<double>& fine, int factor) {
  if (factor < 1 || fine.size() % static_cast<std::size_t>(factor) != 0) {
    throw DomainError("restriction factor must divide the fine grid size");
  }
  std::vector<double> coarse(fine.size() / static_cast<std::size_t>(factor));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < factor; ++k) sum += fine[i * static_cast<std::size_t>(factor) + k];
    coarse[i] = sum / factor;
  }
  return coarse;
}

std::vector<ConvergenceRow> convergence_study(const ScenarioConfig& base,
                                              const std::vector<int>& n_cells,
                                              int reference_factor, std::size_t workers) {
  if (n_cells.size() < 2) throw ConfigError("convergence.n_cells", "needs at least 2 grids");
  if (reference_factor < 2) throw ConfigError("convergence.reference_factor", "must be at least 2");
  for (std::size_t i = 1; i < n_cells.size(); ++i) {
    if (n_cells[i] <= n_cells[i - 1]) throw ConfigError("convergence.n_cells", "must be strictly increasing");
  }
  const int n_ref = reference_factor * n_cells.back();
  for (int n : n_cells) {
    if (n < 3 || n_ref % n != 0) throw ConfigError("convergence.n_cells", "grids must nest in the reference grid");
  }

  std::vector<int> sizes = n_cells;
  sizes.push_back(n_ref);
  std::vector<StateField> finals(sizes.size());
  run_indexed(sizes.size(), workers, [&](std::size_t i) {
    ScenarioConfig config = base;
    config.grid.n_cells = sizes[i];
    try {
      finals[i] = run(build_scenario(config)).final_state;
    } catch (const Error&) {
      rethrow_with_context("convergence n_cells=" + std::to_string(sizes[i]));
    }
  });

  constexpr double kRoundoff = 1e-12;
  const StateField& reference = finals.back();
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < n_cells.size(); ++i) {
    StateField restricted{finals[i].grid, restrict_average(reference.rho, n_ref / n_cells[i]),
                          reference.time};
    ConvergenceRow row;
    row.n_cells = n_cells[i];
    row.dx = finals[i].grid.dx;
    row.l1_error = l1_distance(finals[i], restricted);
    if (i > 0) {
      const auto& prev = rows.back();
      if (prev.l1_error > kRoundoff && row.l1_error > kRoundoff) {
        row.observed_order = std::log(prev.l1_error / row.l1_error) / std::log(prev.dx / row.dx);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rampflow
