#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace polyclt {

using Complex = std::complex<double>;

/// Axis-aligned box in up to four dimensions.
struct Panel {
  static constexpr int kMaxDim = 4;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
};

struct CubatureResult {
  std::vector<Complex> value;
  std::vector<double> error;  // per component, |Kronrod - Gauss| summed over panels
  std::int64_t evaluations = 0;
  std::size_t panels = 0;
  bool converged = false;
};

/// Writes `components` values of the integrand at the point x.
using Integrand = std::function<void(const double* x, Complex* out)>;
/// Decides from the running totals whether to stop refining.
using StopRule = std::function<bool(const std::vector<Complex>& value,
                                    const std::vector<double>& error)>;

/// Adaptive tensor-product Gauss-Kronrod (7/15) cubature over a union of
/// panels. The panel with the largest error is bisected along the axis where
/// swapping the Kronrod rule for the Gauss rule changes the result most.
/// Final sums are taken in panel order, so the result is reproducible.
/// Returns converged = false when max_evals would be exceeded.
CubatureResult integrate_panels(int dim, int components, const Integrand& f,
                                std::vector<Panel> initial, const StopRule& stop,
                                std::int64_t max_evals);

/// Breakpoints 0, +-h, +-h g, +-h g^2, ... clipped at +-radius.
std::vector<double> graded_breakpoints(double radius, double first, double growth);

/// Tensor product of per-axis breakpoint lists.
std::vector<Panel> tensor_panels(const std::vector<std::vector<double>>& axes);

}  // namespace polyclt
