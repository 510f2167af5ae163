#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace exactrd {

/// Value and derivatives of one field component at a node.
struct Jet {
  double f = 0.0;
  double fx = 0.0;
  double fxx = 0.0;
  double ft = 0.0;
};

/// A system of evolution equations  f_i,t = RHS_i(x, t, f, f_x, f_xx).
class PdeSystem {
 public:
  virtual ~PdeSystem() = default;

  virtual int arity() const = 0;
  virtual std::vector<std::string> equation_names() const = 0;

  /// Right-hand sides at n = xs.size() nodes sharing the time t. `jets` and
  /// `out` are node-major: entry k of node i lives at i * arity() + k. The
  /// ft member of the jets is ignored.
  virtual void rhs(double t, std::span<const double> xs, std::span<const Jet> jets,
                   std::span<double> out) const = 0;
};

/// Black-box evaluator of all field components at (x, t).
using FieldFn = std::function<void(double x, double t, std::span<double> out)>;

struct FieldSet {
  int arity = 0;
  FieldFn eval;
};

}  // namespace exactrd
