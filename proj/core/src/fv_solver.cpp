#include "rampflow/fv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rampflow/diagnostics.hpp"
#include "rampflow/error.hpp"

namespace rampflow {
namespace {

// Neumaier-compensated running sum; keeps the discrete mass ledger at
// roundoff level on long runs.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double left_ghost(const std::vector<double>& rho, const BoundaryConditions& bc) {
  return bc.left == BoundaryMode::dirichlet ? bc.left_value : rho.front();
}

// Downstream of a wall the road looks jammed.
double right_ghost(const std::vector<double>& rho, const BoundaryConditions& bc) {
  return bc.right == BoundaryMode::wall ? 1.0 : rho.back();
}

// Boundary-extended copy of the state plus flux storage, reused across steps.
class Stepper {
 public:
  explicit Stepper(const SimulationSetup& setup) : setup_(setup) {
    const int n = setup.grid.n_cells;
    pad_lo_ = 1 + std::max({0, -setup.convective.offset_lo, -setup.reactive.offset_lo});
    pad_hi_ = 1 + std::max({0, setup.convective.offset_hi(), setup.reactive.offset_hi()});
    ext_.resize(static_cast<std::size_t>(pad_lo_ + n + pad_hi_));
    flux_.resize(static_cast<std::size_t>(n + 1));
  }

  StepFluxes advance(const std::vector<double>& rho, double t, double dt,
                     std::vector<double>& next) {
    const auto& s = setup_;
    const int n = s.grid.n_cells;
    const auto& bc = s.solver.boundary;

    const double lghost = left_ghost(rho, bc);
    std::fill(ext_.begin(), ext_.begin() + pad_lo_, lghost);
    std::copy(rho.begin(), rho.end(), ext_.begin() + pad_lo_);
    std::fill(ext_.begin() + pad_lo_ + n, ext_.end(), right_ghost(rho, bc));

    // Interface i sits at the left edge of cell i; its velocity looks at the
    // window of cells i, i+1, ... downstream and the flux is upwinded from
    // cell i-1.
    const auto& conv = s.convective.weights;
    for (int i = 0; i <= n; ++i) {
      const double* window = ext_.data() + pad_lo_ + i + s.convective.offset_lo;
      double r = 0.0;
      for (std::size_t k = 0; k < conv.size(); ++k) r += conv[k] * window[k];
      flux_[static_cast<std::size_t>(i)] =
          ext_[static_cast<std::size_t>(pad_lo_ + i - 1)] * velocity(s.law, r);
    }
    if (bc.left == BoundaryMode::wall) flux_.front() = 0.0;
    if (bc.right == BoundaryMode::wall) flux_.back() = 0.0;

    const double lambda = dt / s.grid.dx;
    for (int j = 0; j < n; ++j) {
      next[static_cast<std::size_t>(j)] =
          rho[static_cast<std::size_t>(j)] -
          lambda * (flux_[static_cast<std::size_t>(j + 1)] - flux_[static_cast<std::size_t>(j)]);
    }

    StepFluxes fluxes;
    fluxes.flux_in = flux_.front();
    fluxes.flux_out = flux_.back();

    // The merge window of cell j is anchored at the cell's left edge.
    CompensatedSum on_total;
    if (!s.on_indicator.empty()) {
      const double q = s.ramps.q_on.at(t);
      const auto& react = s.reactive.weights;
      for (int j = s.on_indicator.begin; j < s.on_indicator.end; ++j) {
        const double chi = s.on_indicator.coverage[static_cast<std::size_t>(j)];
        if (chi == 0.0) continue;
        const double* window = ext_.data() + pad_lo_ + j + s.reactive.offset_lo;
        double r_on = 0.0;
        for (std::size_t k = 0; k < react.size(); ++k) r_on += react[k] * window[k];
        const double src = s_on(q, chi, rho[static_cast<std::size_t>(j)], r_on);
        next[static_cast<std::size_t>(j)] += dt * src;
        on_total.add(src);
      }
    }
    CompensatedSum off_total;
    if (!s.off_indicator.empty()) {
      const double q = s.ramps.q_off.at(t);
      for (int j = s.off_indicator.begin; j < s.off_indicator.end; ++j) {
        const double chi = s.off_indicator.coverage[static_cast<std::size_t>(j)];
        if (chi == 0.0) continue;
        const double src = s_off(q, chi, rho[static_cast<std::size_t>(j)]);
        next[static_cast<std::size_t>(j)] -= dt * src;
        off_total.add(src);
      }
    }
    fluxes.onramp_inflow = s.grid.dx * on_total.value();
    fluxes.offramp_outflow = s.grid.dx * off_total.value();

    for (int j = 0; j < n; ++j) {
      const double v = next[static_cast<std::size_t>(j)];
      if (!(v >= -kDensityTolerance && v <= 1.0 + kDensityTolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "density " << v << " in cell " << j << " left [0, 1] (t=" << t
            << ", dt=" << dt << ")";
        throw InvariantViolation(msg.str());
      }
    }
    return fluxes;
  }

 private:
  const SimulationSetup& setup_;
  int pad_lo_ = 0;
  int pad_hi_ = 0;
  std::vector<double> ext_;
  std::vector<double> flux_;
};

}  // namespace

std::string_view to_string(BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::dirichlet: return "dirichlet";
    case BoundaryMode::extrapolation: return "extrapolation";
    case BoundaryMode::wall: return "wall";
  }
  return "dirichlet";
}

BoundaryMode boundary_mode_from_name(std::string_view name) {
  if (name == "dirichlet") return BoundaryMode::dirichlet;
  if (name == "extrapolation") return BoundaryMode::extrapolation;
  if (name == "wall") return BoundaryMode::wall;
  throw ConfigError("solver.boundary", "has unknown boundary mode '" + std::string(name) +
                                           "' (expected dirichlet, extrapolation or wall)");
}

void validate(const SolverConfig& config) {
  if (!(config.cfl > 0.0 && config.cfl <= 1.0)) {
    throw ConfigError("solver.cfl", "must lie in (0, 1]");
  }
  if (!(config.t_final >= 0.0) || !std::isfinite(config.t_final)) {
    throw ConfigError("solver.t_final", "must be finite and non-negative");
  }
  if (config.snapshot_stride < 1) {
    throw ConfigError("solver.snapshot_stride", "must be at least 1");
  }
  if (config.boundary.right == BoundaryMode::dirichlet) {
    throw ConfigError("solver.right_boundary", "must be extrapolation or wall");
  }
  const double v = config.boundary.left_value;
  if (config.boundary.left == BoundaryMode::dirichlet && !(v >= 0.0 && v <= 1.0)) {
    throw ConfigError("solver.left_value", "must lie in [0, 1]");
  }
}

SimulationSetup make_setup(const Grid& grid, const VelocityLaw& law, const RampConfig& ramps,
                           const DiscreteKernelWeights& convective,
                           const DiscreteKernelWeights& reactive, const SolverConfig& solver,
                           std::optional<Interval> congestion_window) {
  validate(ramps, grid);
  validate(solver);
  if (convective.source != KernelKind::convective || convective.offset_lo != 0) {
    throw ConfigError("kernel.eta_convective", "weights must start at offset 0");
  }
  if (std::abs(convective.dx - grid.dx) > 1e-12 * grid.dx ||
      std::abs(reactive.dx - grid.dx) > 1e-12 * grid.dx) {
    throw ConfigError("grid.n_cells", "does not match the kernel weights' cell width");
  }
  SimulationSetup setup;
  setup.grid = grid;
  setup.law = law;
  setup.ramps = ramps;
  setup.convective = convective;
  setup.reactive = reactive;
  setup.solver = solver;
  setup.congestion_window = congestion_window;
  setup.on_indicator =
      ramps.on_interval ? discretize_indicator(*ramps.on_interval, grid) : empty_indicator(grid);
  setup.off_indicator =
      ramps.off_interval ? discretize_indicator(*ramps.off_interval, grid) : empty_indicator(grid);
  return setup;
}

double nonlocal_sample(const StateField& state, const DiscreteKernelWeights& weights, int j,
                       const BoundaryConditions& boundary) {
  const int n = static_cast<int>(state.rho.size());
  if (j < 0 || j >= n) throw DomainError("cell index out of range");
  const double lghost = left_ghost(state.rho, boundary);
  const double rghost = right_ghost(state.rho, boundary);
  double r = 0.0;
  for (int k = weights.offset_lo; k <= weights.offset_hi(); ++k) {
    const int i = j + k;
    const double value = i < 0 ? lghost : i >= n ? rghost
                                                 : state.rho[static_cast<std::size_t>(i)];
    r += weights.at(k) * value;
  }
  return r;
}

double compute_dt(const StateField& state, const SimulationSetup& setup) {
  const double remaining = setup.solver.t_final - state.time;
  if (remaining <= 0.0) return 0.0;
  // Sufficient for rho^{n+1} in [0, 1]: the convective window can raise the
  // downstream velocity by at most gamma_0 sup|v'| per cell, and each source
  // factor is bounded by its rate.
  const auto bounds = speed_bounds(setup.law);
  const double gamma0 = setup.convective.weights.front();
  double rate = (bounds.max_speed + gamma0 * bounds.max_slope) / setup.grid.dx;
  if (!setup.on_indicator.empty()) rate += setup.ramps.q_on.at(state.time);
  if (!setup.off_indicator.empty()) rate += setup.ramps.q_off.at(state.time);
  if (rate <= 0.0) return remaining;
  const double dt = setup.solver.cfl / rate;
  // Avoid a sliver step from accumulated roundoff in t.
  return dt >= remaining * (1.0 - 1e-12) ? remaining : dt;
}

StepResult step(const StateField& state, double dt, const SimulationSetup& setup) {
  if (state.rho.size() != static_cast<std::size_t>(setup.grid.n_cells)) {
    throw DomainError("state does not match the setup grid");
  }
  Stepper stepper(setup);
  StepResult result;
  result.state.grid = state.grid;
  result.state.rho.resize(state.rho.size());
  result.fluxes = stepper.advance(state.rho, state.time, dt, result.state.rho);
  result.state.time = state.time + dt;
  return result;
}

Trajectory simulate(const StateField& initial, const SimulationSetup& setup) {
  if (initial.rho.size() != static_cast<std::size_t>(setup.grid.n_cells)) {
    throw DomainError("initial state does not match the setup grid");
  }
  for (double v : initial.rho) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("initial", "density must lie in [0, 1]");
  }
  Trajectory traj;
  traj.grid = setup.grid;
  traj.congestion_window =
      setup.congestion_window.value_or(Interval{setup.grid.x_min, setup.grid.x_max});
  const auto window = discretize_indicator(*traj.congestion_window, setup.grid);

  const double t_final = setup.solver.t_final;
  StateField state = initial;
  traj.snapshots.push_back(state);

  Stepper stepper(setup);
  std::vector<double> next(state.rho.size());
  long n = 0;
  while (state.time < t_final) {
    const double dt = compute_dt(state, setup);
    const bool last = dt == t_final - state.time;
    StepRecord record;
    record.step = n;
    record.t = state.time;
    record.dt = dt;
    record.tv = total_variation(state);
    record.mass = total_mass(state);
    record.congestion = congestion_integrand(state.rho, window.coverage, setup.grid.dx);
    try {
      record.fluxes = stepper.advance(state.rho, state.time, dt, next);
    } catch (const InvariantViolation& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "step " << n << " at t=" << state.time << ": " << e.what();
      throw InvariantViolation(msg.str());
    }
    traj.steps.push_back(record);
    state.rho.swap(next);
    state.time = last ? t_final : state.time + dt;
    ++n;
    if (n % setup.solver.snapshot_stride == 0 || state.time >= t_final) {
      traj.snapshots.push_back(state);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace rampflow
