#include "exactrd/coeffs.hpp"

#include <cmath>

#include "exactrd/error.hpp"

namespace exactrd {

namespace {
Expr parse_or_zero(const std::string& s) { return s.empty() ? Expr() : exactrd::parse(s); }
}  // namespace

CoeffSet CoeffSet::parse(const std::string& a, const std::string& b, const std::string& c,
                         const std::string& d, const std::string& f, const std::string& g) {
  if (a.empty()) throw PreconditionError("coefficient a is required");
  return CoeffSet{exactrd::parse(a), parse_or_zero(b), parse_or_zero(c),
                  parse_or_zero(d), parse_or_zero(f), parse_or_zero(g)};
}

void CoeffSet::check_a_nonzero(const Interval& iv, int samples) const {
  if (samples < 2) samples = 2;
  double sign = 0.0;
  for (int i = 0; i < samples; ++i) {
    double t = iv.lo + iv.span() * i / (samples - 1);
    double v = a(t);
    if (v == 0.0 || (sign != 0.0 && std::signbit(v) != std::signbit(sign))) {
      throw PreconditionError("coefficient a vanishes near t=" + std::to_string(t));
    }
    sign = v;
  }
}

CoeffSet CoeffSet::with_scaled_a(double factor) const {
  CoeffSet out = *this;
  out.a = Expr::constant(factor) * a;
  return out;
}

CoeffEval::CoeffEval(CoeffSet cs) : cs_(std::move(cs)), da_(diff(cs_.a)), dd_(diff(cs_.d)) {}

CoeffValues CoeffEval::at(double t) const {
  return CoeffValues{cs_.a(t), cs_.b(t), cs_.c(t), cs_.d(t),
                     cs_.f(t), cs_.g(t), da_(t),   dd_(t)};
}

double CoeffEval::eta(const CoeffValues& v) { return v.da / v.a + 2.0 * v.c - 4.0 * v.d; }

double CoeffEval::sigma(const CoeffValues& v) {
  return v.a * v.b + v.c * v.d - v.d * v.d + 0.5 * v.d * v.da / v.a - 0.5 * v.dd;
}

}  // namespace exactrd
