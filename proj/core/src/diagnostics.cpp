#include "rampflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rampflow/error.hpp"

namespace rampflow {
namespace {

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : values) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

bool same_window(const Interval& w, double a, double b) {
  const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(w.a - a) <= tol && std::abs(w.b - b) <= tol;
}

}  // namespace

double total_variation(std::span<const double> rho) {
  double tv = 0.0;
  for (std::size_t j = 1; j < rho.size(); ++j) tv += std::abs(rho[j] - rho[j - 1]);
  return tv;
}

double total_variation(const StateField& state) { return total_variation(state.rho); }

double total_mass(const StateField& state) {
  return state.grid.dx * compensated_sum(state.rho);
}

double l1_distance(const StateField& a, const StateField& b) {
  if (!(a.grid == b.grid) || a.rho.size() != b.rho.size()) {
    throw DomainError("l1_distance: states live on different grids");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < a.rho.size(); ++j) sum += std::abs(a.rho[j] - b.rho[j]);
  return a.grid.dx * sum;
}

double phi(double r) {
  if (!(r >= -kDensityTolerance && r <= 1.0 + kDensityTolerance)) {
    throw DomainError("phi evaluated at density " + std::to_string(r) + " outside [0, 1]");
  }
  if (r < 0.75) return 0.0;
  if (r <= 0.85) return 10.0 * r - 7.5;
  return 1.0;
}

double congestion_integrand(std::span<const double> rho, std::span<const double> coverage,
                            double dx) {
  double sum = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (coverage[j] != 0.0) sum += coverage[j] * phi(rho[j]);
  }
  return dx * sum;
}

double functional_J(const Trajectory& traj) {
  if (traj.steps.empty() && traj.snapshots.empty()) {
    throw DomainError("functional_J: empty trajectory");
  }
  double j = 0.0;
  for (const auto& s : traj.steps) j += s.dt * s.tv;
  return j;
}

double functional_Psi(const Trajectory& traj, double a, double b) {
  if (!(a < b)) throw ConfigError("functional.a", "must be smaller than functional.b");
  if (traj.steps.empty() && traj.snapshots.empty()) {
    throw DomainError("functional_Psi: empty trajectory");
  }
  double psi = 0.0;
  if (traj.congestion_window && same_window(*traj.congestion_window, a, b)) {
    for (const auto& s : traj.steps) psi += s.dt * s.congestion;
    return psi;
  }
  // Recompute from snapshots; they must sit on every step start.
  const auto window = discretize_indicator(Interval{a, b}, traj.grid);
  if (traj.snapshots.size() < traj.steps.size()) {
    throw ConfigError("functional",
                      "window differs from the recorded one and snapshots do not cover every step");
  }
  for (std::size_t n = 0; n < traj.steps.size(); ++n) {
    const auto& snap = traj.snapshots[n];
    if (std::abs(snap.time - traj.steps[n].t) > 1e-12 * std::max(1.0, snap.time)) {
      throw ConfigError("functional", "snapshots are not aligned with steps");
    }
    psi += traj.steps[n].dt * congestion_integrand(snap.rho, window.coverage, traj.grid.dx);
  }
  return psi;
}

double TheoremConstants::R1_upper(double t) const {
  return rho0_l1 + on_ramp_flow.integral(t);
}

double TheoremConstants::tv_bound(double tv0, double t) const {
  return std::exp(t * H) * (tv0 + t * Q_T);
}

TheoremConstants theorem_constants(const VelocityLaw& law, const RampConfig& ramps,
                                   const ConvectiveKernel& convective, const StateField& rho0,
                                   double t_final) {
  const auto bounds = speed_bounds(law);
  const double q_on = ramps.on_interval ? ramps.q_on.sup(t_final) : 0.0;
  const double q_off = ramps.off_interval ? ramps.q_off.sup(t_final) : 0.0;
  TheoremConstants c;
  c.L_vel = bounds.max_speed + bounds.max_slope;
  c.Q_T = 2.0 * (q_on + q_off);
  c.H = 2.0 * q_on + q_off + convective.peak() * c.L_vel;
  c.rho0_l1 = total_mass(rho0);
  c.horizon = t_final;
  c.on_ramp_flow = ramps.on_ramp_flow();
  c.r_T = c.rho0_l1 * t_final + c.on_ramp_flow.double_integral(t_final);
  return c;
}

MassLedger mass_ledger(const Trajectory& traj) {
  MassLedger ledger;
  const auto& steps = traj.steps;
  ledger.residuals.reserve(steps.size());
  double drift = 0.0;
  for (std::size_t n = 0; n < steps.size(); ++n) {
    const double next_mass =
        n + 1 < steps.size() ? steps[n + 1].mass : total_mass(traj.final_state);
    const auto& f = steps[n].fluxes;
    const double expected =
        steps[n].dt * ((f.flux_in - f.flux_out) + (f.onramp_inflow - f.offramp_outflow));
    const double residual = (next_mass - steps[n].mass) - expected;
    ledger.residuals.push_back(residual);
    ledger.max_abs_residual = std::max(ledger.max_abs_residual, std::abs(residual));
    drift += residual;
  }
  ledger.cumulative_drift = drift;
  return ledger;
}

TvBoundCheck check_tv_bound(const Trajectory& traj, const TheoremConstants& constants) {
  TvBoundCheck check;
  const double tv0 = traj.steps.empty() ? total_variation(traj.final_state) : traj.steps.front().tv;
  check.min_margin = std::numeric_limits<double>::infinity();
  auto test = [&](double t, double tv) {
    const double margin = constants.tv_bound(tv0, t) - tv;
    ++check.checked;
    check.min_margin = std::min(check.min_margin, margin);
    if (margin < 0.0) {
      ++check.violations;
      check.holds = false;
    }
  };
  for (const auto& s : traj.steps) test(s.t, s.tv);
  test(traj.final_state.time, total_variation(traj.final_state));
  return check;
}

}  // namespace rampflow
