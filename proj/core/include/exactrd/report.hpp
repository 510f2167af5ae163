#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace exactrd {

struct EquationResidual {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  // location of the maximum; x is NaN for ODE residuals
  double x_at_max = std::numeric_limits<double>::quiet_NaN();
  double t_at_max = std::numeric_limits<double>::quiet_NaN();
};

/// Per-equation residual summary. pass <=> every max_abs <= tolerance and no
/// node failed to evaluate.
struct ResidualReport {
  std::vector<EquationResidual> equations;
  double tolerance = 0.0;
  std::size_t domain_failures = 0;
  std::size_t nodes = 0;
  bool pass = false;

  double max_residual() const {
    double m = 0.0;
    for (const auto& e : equations) m = e.max_abs > m ? e.max_abs : m;
    return m;
  }

  const EquationResidual* find(const std::string& name) const {
    for (const auto& e : equations)
      if (e.name == name) return &e;
    return nullptr;
  }
};

/// Running accumulator used by the residual evaluators: feed node results in
/// a fixed order to get a deterministic report.
class ResidualAccumulator {
 public:
  ResidualAccumulator(std::vector<std::string> names, double tol);
  void add(std::span<const double> residuals, double x, double t);
  void add_failure();
  ResidualReport finish() const;

 private:
  ResidualReport report_;
  std::vector<double> sums_;
  std::size_t counted_ = 0;
};

}  // namespace exactrd
