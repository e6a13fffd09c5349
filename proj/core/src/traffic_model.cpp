#include "rampflow/traffic_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rampflow/error.hpp"

namespace rampflow {

VelocityLaw VelocityLaw::from_name(std::string_view name) {
  if (name == "linear") return linear();
  if (name == "quadratic") return quadratic();
  throw ConfigError("law.name", "has unknown velocity law '" + std::string(name) +
                                    "' (expected linear or quadratic)");
}

std::string_view VelocityLaw::name() const {
  return kind_ == Kind::linear ? "linear" : "quadratic";
}

double VelocityLaw::eval(double rho) const {
  return kind_ == Kind::linear ? 1.0 - rho : 1.0 - rho * rho;
}

double VelocityLaw::derivative(double rho) const {
  return kind_ == Kind::linear ? -1.0 : -2.0 * rho;
}

SpeedBounds speed_bounds(const VelocityLaw& law) {
  if (law.affine()) {
    return {std::max(std::abs(law.eval(0.0)), std::abs(law.eval(1.0))),
            std::abs(law.derivative(0.0))};
  }
  constexpr int kSamples = 10000;
  SpeedBounds bounds;
  for (int i = 0; i < kSamples; ++i) {
    const double rho = static_cast<double>(i) / (kSamples - 1);
    bounds.max_speed = std::max(bounds.max_speed, std::abs(law.eval(rho)));
    bounds.max_slope = std::max(bounds.max_slope, std::abs(law.derivative(rho)));
  }
  return bounds;
}

double velocity(const VelocityLaw& law, double rho_bar) {
  if (!(rho_bar >= -kDensityTolerance && rho_bar <= 1.0 + kDensityTolerance)) {
    throw DomainError("velocity evaluated at density " + std::to_string(rho_bar) +
                      " outside [0, 1]");
  }
  return law.eval(std::clamp(rho_bar, 0.0, 1.0));
}

RateSchedule::RateSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty() || segments_.front().start != 0.0) {
    throw ConfigError("ramp", "rate schedule must start at t = 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].value >= 0.0) || !std::isfinite(segments_[i].value)) {
      throw ConfigError("ramp", "rates must be finite and non-negative");
    }
    if (i > 0 && !(segments_[i].start > segments_[i - 1].start)) {
      throw ConfigError("ramp", "rate schedule breakpoints must be increasing");
    }
  }
}

RateSchedule RateSchedule::constant(double value) {
  return RateSchedule(std::vector<Segment>{{0.0, value}});
}

double RateSchedule::at(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double time, const Segment& s) { return time < s.start; });
  return it == segments_.begin() ? segments_.front().value : std::prev(it)->value;
}

double RateSchedule::sup(double t_end) const {
  double best = 0.0;
  for (const auto& s : segments_) {
    if (s.start <= t_end) best = std::max(best, s.value);
  }
  return best;
}

double RateSchedule::integral(double t) const {
  double total = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double a = segments_[i].start;
    if (a >= t) break;
    const double b = i + 1 < segments_.size() ? std::min(segments_[i + 1].start, t) : t;
    total += segments_[i].value * (b - a);
  }
  return total;
}

double RateSchedule::double_integral(double t_end) const {
  // integral() is piecewise linear, so the trapezoid rule per segment is exact.
  double total = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double a = segments_[i].start;
    if (a >= t_end) break;
    const double b = i + 1 < segments_.size() ? std::min(segments_[i + 1].start, t_end) : t_end;
    total += 0.5 * (b - a) * (integral(a) + integral(b));
  }
  return total;
}

bool RateSchedule::is_zero() const {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const Segment& s) { return s.value == 0.0; });
}

RateSchedule RateSchedule::scaled(double factor) const {
  auto copy = segments_;
  for (auto& s : copy) s.value *= factor;
  return RateSchedule(std::move(copy));
}

RateSchedule RateSchedule::shifted(double offset) const {
  auto copy = segments_;
  for (auto& s : copy) s.value += offset;
  return RateSchedule(std::move(copy));
}

RateSchedule RampConfig::on_ramp_flow() const {
  if (!on_interval) return RateSchedule::constant(0.0);
  return q_on.scaled(on_interval->length());
}

void validate(const RampConfig& ramps, const Grid& grid) {
  auto check = [&grid](const std::optional<Interval>& interval, const char* field) {
    if (!interval) return;
    if (!(interval->a < interval->b)) {
      throw ConfigError(field, "must have positive length");
    }
    if (interval->a < grid.x_min || interval->b > grid.x_max) {
      throw ConfigError(field, "must lie inside the grid");
    }
  };
  check(ramps.on_interval, "ramp.on_interval");
  check(ramps.off_interval, "ramp.off_interval");
}

IndicatorField discretize_indicator(const Interval& interval, const Grid& grid) {
  if (!(interval.a < interval.b)) {
    throw ConfigError("interval", "must satisfy a < b");
  }
  if (interval.a < grid.x_min || interval.b > grid.x_max) {
    throw ConfigError("interval", "must lie inside the grid");
  }
  // Work in cell units so that grid-aligned endpoints give exact 0/1 fractions.
  auto to_cells = [&grid](double x) {
    const double c = (x - grid.x_min) / grid.dx;
    const double nearest = std::round(c);
    return std::abs(c - nearest) < 1e-9 ? nearest : c;
  };
  const double fa = to_cells(interval.a);
  const double fb = to_cells(interval.b);
  IndicatorField field;
  field.coverage.assign(static_cast<std::size_t>(grid.n_cells), 0.0);
  field.begin = grid.n_cells;
  field.end = 0;
  for (int j = std::max(0, static_cast<int>(std::floor(fa)));
       j < std::min(grid.n_cells, static_cast<int>(std::ceil(fb))); ++j) {
    const double c = std::clamp(std::min(fb, j + 1.0) - std::max(fa, static_cast<double>(j)),
                                0.0, 1.0);
    field.coverage[static_cast<std::size_t>(j)] = c;
    if (c > 0.0) {
      field.begin = std::min(field.begin, j);
      field.end = std::max(field.end, j + 1);
    }
  }
  if (field.begin > field.end) field.begin = field.end;
  return field;
}

IndicatorField empty_indicator(const Grid& grid) {
  IndicatorField field;
  field.coverage.assign(static_cast<std::size_t>(grid.n_cells), 0.0);
  return field;
}

double s_on(double q_on_t, double chi, double rho, double r_on) {
  if (q_on_t < 0.0) throw ConfigError("ramp.q_on", "must be non-negative");
  return chi * q_on_t * (1.0 - rho) * (1.0 - r_on);
}

double s_off(double q_off_t, double chi, double rho) {
  if (q_off_t < 0.0) throw ConfigError("ramp.q_off", "must be non-negative");
  return chi * q_off_t * rho;
}

}  // namespace rampflow
