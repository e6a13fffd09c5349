#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

namespace rampflow {

/// Uniform 1D cell-centred grid on [x_min, x_max].
struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_cells = 0;
  double dx = 0.0;

  double center(int j) const { return x_min + (j + 0.5) * dx; }
  double left_edge(int j) const { return x_min + j * dx; }
  double length() const { return x_max - x_min; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid build_grid(double x_min, double x_max, int n_cells);

/// Downstream look-ahead kernel w(x) = 2(eta - x)/eta^2 on [0, eta].
class ConvectiveKernel {
 public:
  explicit ConvectiveKernel(double eta);

  double eta() const { return eta_; }
  double density(double x) const;
  /// Closed-form primitive (2 eta x - x^2)/eta^2, clamped to the support.
  double cumulative(double x) const;
  double peak() const { return 2.0 / eta_; }

 private:
  double eta_;
};

/// Merge-look kernel of half-width eta centred at delta:
/// w(x) = 16/(5 pi eta^6) (eta^2 - (x - delta)^2)^{5/2} on [delta - eta, delta + eta].
class ReactiveKernel {
 public:
  ReactiveKernel(double eta, double delta);

  double eta() const { return eta_; }
  double delta() const { return delta_; }
  double density(double x) const;
  double support_lo() const { return delta_ - eta_; }
  double support_hi() const { return delta_ + eta_; }

 private:
  double eta_;
  double delta_;
};

enum class KernelKind { convective, reactive };

std::string_view to_string(KernelKind kind);

/// Cell-integrated kernel weights. Weight i covers the offset cell
/// [k dx, (k+1) dx] with k = offset_lo + i. Weights are non-negative and sum
/// to one.
struct DiscreteKernelWeights {
  int offset_lo = 0;
  std::vector<double> weights;
  KernelKind source = KernelKind::convective;
  double dx = 0.0;
  /// Set when the kernel support fits inside a single cell.
  bool single_cell = false;

  int offset_hi() const { return offset_lo + static_cast<int>(weights.size()) - 1; }
  /// Weight for offset k, zero outside [offset_lo, offset_hi].
  double at(int k) const;
};

DiscreteKernelWeights discretize_convective(const ConvectiveKernel& kernel, double dx);
DiscreteKernelWeights discretize_reactive(const ReactiveKernel& kernel, double dx);

/// Sum_k |a_k - b_k| over the union of both offset ranges. The cell width is
/// already folded into the weights, so this approximates the L1 distance of
/// the underlying densities.
double kernel_l1_distance(const DiscreteKernelWeights& a, const DiscreteKernelWeights& b);

/// CSV with header `k,x_left,x_right,gamma_k`.
void write_weights_csv(std::ostream& out, const DiscreteKernelWeights& w);

}  // namespace rampflow
