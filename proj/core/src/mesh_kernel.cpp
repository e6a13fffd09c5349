#include "rampflow/mesh_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>

#include "rampflow/csv.hpp"
#include "rampflow/error.hpp"

namespace rampflow {
namespace {

// Offsets that land within this many cells of an integer are treated as
// grid-aligned, so that e.g. 0.4/0.005 does not grow a spurious empty cell.
constexpr double kAlignTolerance = 1e-9;

double snap(double cells) {
  const double nearest = std::round(cells);
  return std::abs(cells - nearest) < kAlignTolerance ? nearest : cells;
}

void normalize(std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w /= sum;
}

}  // namespace

Grid build_grid(double x_min, double x_max, int n_cells) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw ConfigError("grid.x_max", "must be larger than grid.x_min");
  }
  if (n_cells < 3) {
    throw ConfigError("grid.n_cells", "must be at least 3, got " + std::to_string(n_cells));
  }
  return Grid{x_min, x_max, n_cells, (x_max - x_min) / n_cells};
}

ConvectiveKernel::ConvectiveKernel(double eta) : eta_(eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("kernel.eta_convective", "must be positive");
  }
}

double ConvectiveKernel::density(double x) const {
  if (x < 0.0 || x > eta_) return 0.0;
  return 2.0 * (eta_ - x) / (eta_ * eta_);
}

double ConvectiveKernel::cumulative(double x) const {
  x = std::clamp(x, 0.0, eta_);
  return (2.0 * eta_ * x - x * x) / (eta_ * eta_);
}

ReactiveKernel::ReactiveKernel(double eta, double delta) : eta_(eta), delta_(delta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("kernel.eta", "must be positive");
  }
  if (!(delta >= -eta && delta <= eta)) {
    throw ConfigError("kernel.delta", "must lie in [-eta, eta]");
  }
}

double ReactiveKernel::density(double x) const {
  const double u = x - delta_;
  const double gap = eta_ * eta_ - u * u;
  if (gap <= 0.0) return 0.0;
  const double eta3 = eta_ * eta_ * eta_;
  const double scale = 16.0 / (5.0 * std::numbers::pi * eta3 * eta3);
  return scale * gap * gap * std::sqrt(gap);
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::convective ? "convective" : "reactive";
}

double DiscreteKernelWeights::at(int k) const {
  if (k < offset_lo || k > offset_hi()) return 0.0;
  return weights[static_cast<std::size_t>(k - offset_lo)];
}

DiscreteKernelWeights discretize_convective(const ConvectiveKernel& kernel, double dx) {
  if (!(dx > 0.0)) throw ConfigError("grid.dx", "cell width must be positive");
  DiscreteKernelWeights out;
  out.source = KernelKind::convective;
  out.dx = dx;
  out.offset_lo = 0;
  const int n = static_cast<int>(std::ceil(snap(kernel.eta() / dx)));
  if (n <= 1) {
    out.single_cell = true;
    out.weights = {1.0};
    return out;
  }
  out.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double hi = k + 1 == n ? kernel.eta() : (k + 1) * dx;
    out.weights[static_cast<std::size_t>(k)] = kernel.cumulative(hi) - kernel.cumulative(k * dx);
  }
  // The differences telescope to cumulative(eta) = 1, so no renormalisation.
  return out;
}

DiscreteKernelWeights discretize_reactive(const ReactiveKernel& kernel, double dx) {
  if (!(dx > 0.0)) throw ConfigError("grid.dx", "cell width must be positive");
  DiscreteKernelWeights out;
  out.source = KernelKind::reactive;
  out.dx = dx;
  const double lo = kernel.support_lo();
  const double hi = kernel.support_hi();
  out.offset_lo = static_cast<int>(std::floor(snap(lo / dx)));
  const int offset_hi = static_cast<int>(std::ceil(snap(hi / dx))) - 1;
  out.single_cell = offset_hi == out.offset_lo;
  out.weights.resize(static_cast<std::size_t>(offset_hi - out.offset_lo + 1));

  // The density behaves like (distance to the support edge)^{5/2}, so a
  // composite 8-point Gauss rule on panels no wider than eta/256 keeps the
  // per-cell error far below 1e-10.
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const double max_panel = kernel.eta() / 256.0;
  auto f = [&kernel](double x) { return kernel.density(x); };
  for (int k = out.offset_lo; k <= offset_hi; ++k) {
    const double a = std::max(k * dx, lo);
    const double b = std::min((k + 1) * dx, hi);
    double integral = 0.0;
    if (b > a) {
      const int panels = std::max(4, static_cast<int>(std::ceil((b - a) / max_panel)));
      const double h = (b - a) / panels;
      for (int p = 0; p < panels; ++p) {
        const double pa = a + p * h;
        const double pb = p + 1 == panels ? b : pa + h;
        integral += Rule::integrate(f, pa, pb);
      }
    }
    out.weights[static_cast<std::size_t>(k - out.offset_lo)] = integral;
  }
  normalize(out.weights);
  return out;
}

double kernel_l1_distance(const DiscreteKernelWeights& a, const DiscreteKernelWeights& b) {
  if (std::abs(a.dx - b.dx) > 1e-15 * std::max(a.dx, b.dx)) {
    throw ConfigError("kernel", "weights were built on different cell widths");
  }
  const int lo = std::min(a.offset_lo, b.offset_lo);
  const int hi = std::max(a.offset_hi(), b.offset_hi());
  double sum = 0.0;
  for (int k = lo; k <= hi; ++k) sum += std::abs(a.at(k) - b.at(k));
  return sum;
}

void write_weights_csv(std::ostream& out, const DiscreteKernelWeights& w) {
  CsvWriter csv(out);
  csv.header({"k", "x_left", "x_right", "gamma_k"});
  for (int k = w.offset_lo; k <= w.offset_hi(); ++k) {
    csv << k << k * w.dx << (k + 1) * w.dx << w.at(k);
    csv.end_row();
  }
}

}  // namespace rampflow
