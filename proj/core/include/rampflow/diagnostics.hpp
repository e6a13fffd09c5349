#pragma once

#include <span>
#include <vector>

#include "rampflow/fv_solver.hpp"

namespace rampflow {

double total_variation(std::span<const double> rho);
double total_variation(const StateField& state);

/// dx * sum_j rho_j, compensated.
double total_mass(const StateField& state);

double l1_distance(const StateField& a, const StateField& b);

/// Piecewise-linear congestion weight: 0 below 0.75, 1 above 0.85.
double phi(double r);

/// dx * sum_j coverage_j phi(rho_j).
double congestion_integrand(std::span<const double> rho, std::span<const double> coverage,
                            double dx);

/// sum_n dt_n TV(rho^n), left-endpoint rule over accepted steps.
double functional_J(const Trajectory& traj);

/// sum_n dt_n dx sum_j coverage_j phi(rho^n_j) over [a, b]. Uses the per-step
/// record when [a, b] is the trajectory's congestion window, otherwise needs a
/// snapshot for every step.
double functional_Psi(const Trajectory& traj, double a, double b);

/// A-priori constants of the total variation and L1 estimates.
struct TheoremConstants {
  double L_vel = 0.0;  ///< sup|v| + sup|v'| on [0, 1]
  double Q_T = 0.0;    ///< 2 (sup q_on + sup q_off)
  double H = 0.0;      ///< 2 sup q_on + sup q_off + w_eta(0) L_vel
  double rho0_l1 = 0.0;
  double horizon = 0.0;
  RateSchedule on_ramp_flow;
  double r_T = 0.0;  ///< integral over [0, T] of R1_upper

  /// ||rho0||_1 + integral_0^t of the on-ramp inflow. The subtracted minimum
  /// terms of the sharp bound depend on the solution and are dropped.
  double R1_upper(double t) const;
  /// e^{tH} (TV0 + t Q_T).
  double tv_bound(double tv0, double t) const;
};

TheoremConstants theorem_constants(const VelocityLaw& law, const RampConfig& ramps,
                                   const ConvectiveKernel& convective,
                                   const StateField& rho0, double t_final);

struct MassLedger {
  std::vector<double> residuals;  ///< one per step
  double max_abs_residual = 0.0;
  double cumulative_drift = 0.0;
};

/// Residual of mass_{n+1} - mass_n - dt_n (F_in - F_out + onramp - offramp).
MassLedger mass_ledger(const Trajectory& traj);

struct TvBoundCheck {
  bool holds = true;
  long checked = 0;
  long violations = 0;
  /// min over steps of bound - TV.
  double min_margin = 0.0;
};

/// Checks TV(rho(t_n)) <= e^{t_n H}(TV(rho0) + t_n Q_T) at every step and at the
/// final state.
TvBoundCheck check_tv_bound(const Trajectory& traj, const TheoremConstants& constants);

}  // namespace rampflow
