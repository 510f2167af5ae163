#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "exactrd/coeffs.hpp"
#include "exactrd/ode.hpp"
#include "exactrd/pde.hpp"
#include "exactrd/verify.hpp"

namespace exactrd {

class GeneralizedSolution;

enum class SpatialScheme {
  /// Second-order central differences for f_x and f_xx.
  Central2,
  /// Backward difference for f_x (first order); test fixture for the order
  /// estimator only.
  Upwind1,
};

/// Method-of-lines problem on [x_lo, x_hi] x [t0, t1] with Dirichlet data and
/// initial condition taken from `exact`.
struct MolProblem {
  std::shared_ptr<const PdeSystem> system;
  FieldSet exact;
  double x_lo = -1.0, x_hi = 1.0;
  int nx = 101;
  double t0 = 0.0, t1 = 1.0;
  /// Interval on which `exact` may be evaluated.
  Interval valid = kUnbounded;
  SpatialScheme scheme = SpatialScheme::Central2;

  /// Throws PreconditionError unless nx >= 11, x_lo < x_hi, t0 <= t1 and
  /// [t0, t1] lies inside `valid`.
  void validate() const;
  double dx() const { return (x_hi - x_lo) / (nx - 1); }
  double x(int i) const { return i == nx - 1 ? x_hi : x_lo + i * dx(); }

  static MolProblem from_solution(const GeneralizedSolution& sol, double x_lo, double x_hi, int nx,
                                  double t0, double t1);
};

struct MolOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
};

struct MolResult {
  int arity = 0;
  std::vector<double> x;
  /// Node-major: component k at node i is at i * arity + k.
  std::vector<double> numeric;
  std::vector<double> exact;
  double t1 = 0.0;
  /// Over all components and nodes.
  double linf = 0.0;
  /// Per component.
  std::vector<double> linf_component;
  /// max |exact| at t1, the scale of the time-integration error.
  double max_abs_exact = 0.0;
  /// sqrt(dx * sum of squared errors) over all components and nodes.
  double l2 = 0.0;
  OdeStats stats;
};

/// Integrates the semi-discrete system with adaptive Dormand-Prince 5(4).
/// Boundary values are re-injected from the exact solution at every stage.
/// Throws IntegrationError (with the failing time and grid) when the step
/// size underflows or the state stops being finite.
MolResult integrate(const MolProblem& p, const MolOptions& opts = {});

struct ConvergenceRow {
  int nx = 0;
  double dx = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double max_abs_exact = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(linf) against log(dx); empty when `floor`.
  std::optional<double> order;
  /// Every error is below the time-integration noise level
  /// 100 (rtol max|exact| + atol), so there is no spatial error to fit.
  bool floor = false;
};

/// Runs `integrate` for every entry of `nx_list` (at least 3, strictly
/// increasing). Independent runs are spread over `threads` workers.
ConvergenceStudy convergence_study(const MolProblem& p, std::span<const int> nx_list,
                                   const MolOptions& opts = {}, int threads = 1);

}  // namespace exactrd
