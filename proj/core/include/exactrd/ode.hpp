#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace exactrd {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double first_step = 0.0;  // 0 picks one automatically
  std::size_t max_steps = 10'000'000;
  bool dense = true;  // keep every accepted step for interpolation
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double min_step = 0.0;
  double max_step = 0.0;
};

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Called after every accepted step with the new (t, y). Throwing aborts the
/// integration.
using OdeObserver = std::function<void(double t, std::span<const double> y)>;

/// Piecewise cubic Hermite interpolant through the accepted steps, built from
/// the state and its derivative at every step boundary. Nodes are stored in
/// increasing t regardless of the direction of integration.
class DenseOutput {
 public:
  DenseOutput() = default;
  DenseOutput(std::size_t dim, std::vector<double> t, std::vector<double> y,
              std::vector<double> dy);

  std::size_t dim() const { return dim_; }
  std::size_t nodes() const { return t_.size(); }
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  std::span<const double> node_times() const { return t_; }
  std::span<const double> node_state(std::size_t i) const {
    return {y_.data() + i * dim_, dim_};
  }

  void eval(double t, std::span<double> out) const;
  double eval(std::size_t component, double t) const;
  /// Derivative of the interpolant.
  double deriv(std::size_t component, double t) const;

  /// Merge a solution integrated backward from t_a with one integrated
  /// forward from t_a. Both must share the node at t_a.
  static DenseOutput join(const DenseOutput& backward, const DenseOutput& forward);

 private:
  std::size_t locate(double t) const;
  std::size_t dim_ = 0;
  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> dy_;
};

struct OdeSolution {
  DenseOutput dense;
  std::vector<double> y_final;
  OdeStats stats;
};

/// Adaptive Dormand-Prince 5(4) with FSAL. Integrates from t0 to t1 (t1 < t0
/// integrates backward). Throws IntegrationError on step-size underflow,
/// exhausted step budget, or a non-finite state that cannot be avoided by
/// shrinking the step.
OdeSolution integrate_ode(const OdeRhs& rhs, double t0, std::span<const double> y0, double t1,
                          const OdeOptions& opts = {}, const OdeObserver& observer = {});

}  // namespace exactrd
