#pragma once

#include <string>

#include "exactrd/expr.hpp"

namespace exactrd {

/// Closed time interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t >= lo && t <= hi; }
  double span() const { return hi - lo; }
};

/// Coefficients of the operator
///   H(psi) = a psi_xx - b x^2 psi + c x psi_x + d psi + x f psi - g psi_x.
/// All except `a` default to zero.
struct CoeffSet {
  Expr a;
  Expr b;
  Expr c;
  Expr d;
  Expr f;
  Expr g;

  /// Parse all six from text; empty strings mean zero except for `a`.
  static CoeffSet parse(const std::string& a, const std::string& b = "", const std::string& c = "",
                        const std::string& d = "", const std::string& f = "",
                        const std::string& g = "");

  /// Throws PreconditionError if a(t) vanishes (or changes sign) at any of
  /// `samples` evenly spaced points of the interval.
  void check_a_nonzero(const Interval& iv, int samples = 1001) const;

  /// Same coefficients with `a` scaled by `factor`.
  CoeffSet with_scaled_a(double factor) const;
};

/// Evaluated coefficient values and the two derivatives needed by the
/// characteristic equation.
struct CoeffValues {
  double a, b, c, d, f, g, da, dd;
};

/// Coefficient set bundled with its exact derivatives a' and d'.
class CoeffEval {
 public:
  explicit CoeffEval(CoeffSet cs);
  CoeffValues at(double t) const;
  const CoeffSet& set() const { return cs_; }

  /// eta = a'/a + 2c - 4d
  static double eta(const CoeffValues& v);
  /// sigma = ab + cd - d^2 + d a'/(2a) - d'/2, the removable form of
  /// ab + cd - d^2 + (d/2)(a'/a - d'/d).
  static double sigma(const CoeffValues& v);

 private:
  CoeffSet cs_;
  Expr da_;
  Expr dd_;
};

}  // namespace exactrd
