#include "exactrd/finite_diff.hpp"

#include <algorithm>
#include <cmath>

#include "exactrd/error.hpp"

namespace exactrd {

namespace {

// Five-point first-derivative weights (times 12h) on offsets s..s+4.
constexpr double kFirst[5][5] = {
    {3, -16, 36, -48, 25},   // s = -4
    {-1, 6, -18, 10, 3},     // s = -3
    {1, -8, 0, 8, -1},       // s = -2
    {-3, -10, 18, -6, 1},    // s = -1
    {-25, 48, -36, 16, -3},  // s = 0
};

double first_at(const std::function<double(double)>& f, double x, double h, int s) {
  const double* w = kFirst[s + 4];
  double acc = 0.0;
  for (int j = 0; j < 5; ++j) {
    if (w[j] == 0.0) continue;
    acc += w[j] * f(x + (s + j) * h);
  }
  return acc / (12.0 * h);
}

}  // namespace

DerivEstimate fd_first(const std::function<double(double)>& f, double x, double h, double lo,
                       double hi) {
  if (!(h > 0.0)) throw PreconditionError("fd_first: step must be positive");
  if (hi - lo < 4 * h) h = (hi - lo) / 4;
  auto room = [&](double dist) {
    if (!std::isfinite(dist)) return 2;
    return static_cast<int>(std::clamp(std::floor(dist / h), 0.0, 2.0));
  };
  int room_lo = room(x - lo), room_hi = room(hi - x);
  int s = -2;
  if (room_lo < 2) {
    s = -room_lo;
  } else if (room_hi < 2) {
    s = -4 + room_hi;
  }
  double d1 = first_at(f, x, h, s);
  double d2 = first_at(f, x, 0.5 * h, s);
  double r = (16.0 * d2 - d1) / 15.0;
  return {r, std::fabs(r - d2)};
}

DerivEstimate fd_second(const std::function<double(double)>& f, double x, double h) {
  if (!(h > 0.0)) throw PreconditionError("fd_second: step must be positive");
  auto at = [&](double hh) {
    double fm2 = f(x - 2 * hh), fm1 = f(x - hh), f0 = f(x), fp1 = f(x + hh), fp2 = f(x + 2 * hh);
    return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * hh * hh);
  };
  double d1 = at(h);
  double d2 = at(0.5 * h);
  double r = (16.0 * d2 - d1) / 15.0;
  return {r, std::fabs(r - d2)};
}

}  // namespace exactrd
