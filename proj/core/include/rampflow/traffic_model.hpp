#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rampflow/mesh_kernel.hpp"

namespace rampflow {

/// Roundoff band tolerated around the invariant region [0, 1].
inline constexpr double kDensityTolerance = 1e-12;

/// Speed law v(rho) on [0, 1]; non-negative and non-increasing.
class VelocityLaw {
 public:
  enum class Kind { linear, quadratic };

  static VelocityLaw linear() { return VelocityLaw(Kind::linear); }
  static VelocityLaw quadratic() { return VelocityLaw(Kind::quadratic); }
  /// Accepts "linear" (1 - rho) and "quadratic" (1 - rho^2).
  static VelocityLaw from_name(std::string_view name);

  Kind kind() const { return kind_; }
  std::string_view name() const;
  bool affine() const { return kind_ == Kind::linear; }

  /// Unchecked evaluation.
  double eval(double rho) const;
  double derivative(double rho) const;

 private:
  explicit VelocityLaw(Kind kind) : kind_(kind) {}
  Kind kind_;
};

/// sup |v| and sup |v'| on [0, 1]: exact for the affine law, sampled on 10^4
/// points otherwise.
struct SpeedBounds {
  double max_speed = 0.0;
  double max_slope = 0.0;
};
SpeedBounds speed_bounds(const VelocityLaw& law);

/// Checked evaluation: inputs within kDensityTolerance of [0, 1] are clamped,
/// anything further out raises DomainError.
double velocity(const VelocityLaw& law, double rho_bar);

/// Piecewise-constant non-negative function of time. Segment i holds `value`
/// on [start_i, start_{i+1}); the last segment extends to infinity.
class RateSchedule {
 public:
  struct Segment {
    double start = 0.0;
    double value = 0.0;
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  RateSchedule() : RateSchedule(constant(0.0)) {}
  explicit RateSchedule(std::vector<Segment> segments);
  static RateSchedule constant(double value);

  double at(double t) const;
  /// sup over [0, t_end].
  double sup(double t_end) const;
  /// Integral over [0, t].
  double integral(double t) const;
  /// Integral over [0, t_end] of integral(t).
  double double_integral(double t_end) const;
  bool is_zero() const;

  RateSchedule scaled(double factor) const;
  RateSchedule shifted(double offset) const;

  const std::vector<Segment>& segments() const { return segments_; }
  friend bool operator==(const RateSchedule&, const RateSchedule&) = default;

 private:
  std::vector<Segment> segments_;
};

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ramp geometry and source intensities. `q_on` and `q_off` are source rates
/// per unit road length, i.e. the factor multiplying the indicator of the
/// ramp interval in the balance law.
struct RampConfig {
  std::optional<Interval> on_interval;
  std::optional<Interval> off_interval;
  RateSchedule q_on;
  RateSchedule q_off;

  /// Total vehicles per unit time the on-ramp can inject, |on| * q_on(t).
  RateSchedule on_ramp_flow() const;
};

void validate(const RampConfig& ramps, const Grid& grid);

/// Fraction of each cell covered by an interval.
struct IndicatorField {
  std::vector<double> coverage;
  /// First and one-past-last cell with non-zero coverage.
  int begin = 0;
  int end = 0;

  bool empty() const { return begin >= end; }
};

IndicatorField discretize_indicator(const Interval& interval, const Grid& grid);
/// All-zero field, used for absent ramps.
IndicatorField empty_indicator(const Grid& grid);

/// chi q (1 - rho)(1 - r_on).
double s_on(double q_on_t, double chi, double rho, double r_on);
/// chi q rho.
double s_off(double q_off_t, double chi, double rho);

}  // namespace rampflow
