#include "exactrd/report.hpp"

#include <cmath>

namespace exactrd {

ResidualAccumulator::ResidualAccumulator(std::vector<std::string> names, double tol)
    : sums_(names.size(), 0.0) {
  report_.tolerance = tol;
  for (auto& n : names) {
    EquationResidual e;
    e.name = std::move(n);
    report_.equations.push_back(std::move(e));
  }
}

void ResidualAccumulator::add(std::span<const double> r, double x, double t) {
  ++report_.nodes;
  bool finite = true;
  for (double v : r) finite = finite && std::isfinite(v);
  if (!finite) {
    ++report_.domain_failures;
    return;
  }
  ++counted_;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double a = std::fabs(r[i]);
    sums_[i] += a;
    auto& e = report_.equations[i];
    if (a > e.max_abs || counted_ == 1) {
      e.max_abs = a;
      e.x_at_max = x;
      e.t_at_max = t;
    }
  }
}

void ResidualAccumulator::add_failure() {
  ++report_.nodes;
  ++report_.domain_failures;
}

ResidualReport ResidualAccumulator::finish() const {
  ResidualReport out = report_;
  bool ok = out.domain_failures == 0 && counted_ > 0;
  for (std::size_t i = 0; i < out.equations.size(); ++i) {
    auto& e = out.equations[i];
    e.mean_abs = counted_ ? sums_[i] / static_cast<double>(counted_) : 0.0;
    ok = ok && e.max_abs <= out.tolerance;
  }
  out.pass = ok;
  return out;
}

}  // namespace exactrd
