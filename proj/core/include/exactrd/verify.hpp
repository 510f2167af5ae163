#pragma once

#include <limits>
#include <span>
#include <vector>

#include "exactrd/coeffs.hpp"
#include "exactrd/finite_diff.hpp"
#include "exactrd/pde.hpp"
#include "exactrd/report.hpp"

namespace exactrd {

/// Uniform space-time grid, endpoints included.
struct Grid {
  double x_lo = 0.0, x_hi = 1.0;
  int nx = 3;
  double t_lo = 0.0, t_hi = 1.0;
  int nt = 3;

  /// Throws PreconditionError unless nx, nt >= 3 and both ranges are proper.
  void validate() const;
  double x(int i) const;
  double t(int j) const;
  std::vector<double> xs() const;
  std::vector<double> ts() const;
};

inline constexpr Interval kUnbounded{-std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity()};

/// f, f_x, f_xx, f_t for every component of a field set at one node.
/// Spatial derivatives use five-point central stencils, the time derivative a
/// five-point stencil that turns one-sided within 2 h_t of `t_domain`; each is
/// refined by one Richardson level (h and h/2). `error`, when non-empty,
/// receives 4 entries per component: the magnitude of the last correction of
/// f (always 0), f_x, f_xx and f_t.
void field_derivs(const FieldSet& fields, double x, double t, double h_x, double h_t,
                  std::span<Jet> out, const Interval& t_domain = kUnbounded,
                  std::span<double> error = {});

/// Scalar convenience form.
struct ScalarDerivs {
  DerivEstimate f, fx, fxx, ft;
};
ScalarDerivs field_derivs(const std::function<double(double, double)>& f, double x, double t,
                          double h_x, double h_t, const Interval& t_domain = kUnbounded);

struct ResidualOptions {
  /// Base steps; 0 selects 1e-3 of the x span and 2.5e-4 of the t span.
  double h_x = 0.0;
  double h_t = 0.0;
  /// Time range in which the fields may be evaluated.
  Interval t_domain = kUnbounded;
  /// Worker threads for node evaluation; the report does not depend on it.
  int threads = 1;
};

/// LHS - RHS of every equation at every grid node. Nodes where a field or
/// coefficient evaluation throws or produces a non-finite value are counted
/// as domain failures and excluded from the statistics.
ResidualReport residual(const PdeSystem& system, const FieldSet& fields, const Grid& grid,
                        double tol, const ResidualOptions& opts = {});

}  // namespace exactrd
