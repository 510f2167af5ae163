#pragma once

#include <functional>
#include <limits>

namespace exactrd {

/// Derivative estimate with the size of the last Richardson correction.
struct DerivEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// First derivative by a five-point fourth-order stencil at steps h and h/2,
/// combined by one Richardson level. When x +- 2h leaves [lo, hi] the stencil
/// is shifted to a one-sided five-point form of the same order.
DerivEstimate fd_first(const std::function<double(double)>& f, double x, double h,
                       double lo = -std::numeric_limits<double>::infinity(),
                       double hi = std::numeric_limits<double>::infinity());

/// Second derivative by the five-point central stencil with one Richardson
/// level.
DerivEstimate fd_second(const std::function<double(double)>& f, double x, double h);

}  // namespace exactrd
