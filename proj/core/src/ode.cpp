#include "exactrd/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exactrd/error.hpp"

namespace exactrd {

DenseOutput::DenseOutput(std::size_t dim, std::vector<double> t, std::vector<double> y,
                         std::vector<double> dy)
    : dim_(dim), t_(std::move(t)), y_(std::move(y)), dy_(std::move(dy)) {
  if (t_.empty() || y_.size() != t_.size() * dim_ || dy_.size() != y_.size()) {
    throw PreconditionError("DenseOutput: inconsistent node arrays");
  }
}

std::size_t DenseOutput::locate(double t) const {
  double slack = 1e-12 * std::max(1.0, std::max(std::fabs(t_.front()), std::fabs(t_.back())));
  if (!(t >= t_.front() - slack && t <= t_.back() + slack)) {
    throw PreconditionError("dense output evaluated outside [" + std::to_string(t_.front()) +
                            ", " + std::to_string(t_.back()) + "] at t=" + std::to_string(t));
  }
  if (t_.size() == 1) return 0;
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(i, t_.size() - 2);
}

void DenseOutput::eval(double t, std::span<double> out) const {
  for (std::size_t k = 0; k < dim_; ++k) out[k] = eval(k, t);
}

double DenseOutput::eval(std::size_t k, double t) const {
  std::size_t i = locate(t);
  if (t_.size() == 1) return y_[k];
  double h = t_[i + 1] - t_[i];
  double s = (t - t_[i]) / h;
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double* y0 = &y_[i * dim_];
  const double* y1 = &y_[(i + 1) * dim_];
  const double* f0 = &dy_[i * dim_];
  const double* f1 = &dy_[(i + 1) * dim_];
  return h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k];
}

double DenseOutput::deriv(std::size_t k, double t) const {
  std::size_t i = locate(t);
  if (t_.size() == 1) return dy_[k];
  double h = t_[i + 1] - t_[i];
  double s = (t - t_[i]) / h;
  double s2 = s * s;
  double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1;
  double d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
  return d00 * y_[i * dim_ + k] + d10 * dy_[i * dim_ + k] + d01 * y_[(i + 1) * dim_ + k] +
         d11 * dy_[(i + 1) * dim_ + k];
}

DenseOutput DenseOutput::join(const DenseOutput& backward, const DenseOutput& forward) {
  if (backward.dim_ != forward.dim_ || backward.t_.back() != forward.t_.front()) {
    throw PreconditionError("DenseOutput::join: pieces do not meet");
  }
  std::vector<double> t(backward.t_.begin(), backward.t_.end() - 1);
  t.insert(t.end(), forward.t_.begin(), forward.t_.end());
  std::size_t d = backward.dim_;
  std::vector<double> y(backward.y_.begin(), backward.y_.end() - static_cast<long>(d));
  y.insert(y.end(), forward.y_.begin(), forward.y_.end());
  std::vector<double> dy(backward.dy_.begin(), backward.dy_.end() - static_cast<long>(d));
  dy.insert(dy.end(), forward.dy_.begin(), forward.dy_.end());
  return DenseOutput(d, std::move(t), std::move(y), std::move(dy));
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

OdeSolution integrate_ode(const OdeRhs& rhs, double t0, std::span<const double> y0, double t1,
                          const OdeOptions& opts, const OdeObserver& observer) {
  const std::size_t n = y0.size();
  OdeSolution sol;
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

  auto call = [&](double t, const std::vector<double>& in, std::vector<double>& out) {
    rhs(t, in, out);
    ++sol.stats.rhs_evals;
  };

  call(t0, y, k1);
  if (!all_finite(y) || !all_finite(k1)) {
    throw IntegrationError("non-finite initial state at t=" + std::to_string(t0));
  }

  std::vector<double> ts{t0}, ys(y), dys(k1);
  auto finish = [&](double t_end) {
    sol.y_final = y;
    if (opts.dense) {
      if (t1 < t0) {
        // store in increasing time
        std::size_t m = ts.size();
        std::vector<double> rt(m), ry(m * n), rdy(m * n);
        for (std::size_t i = 0; i < m; ++i) {
          rt[i] = ts[m - 1 - i];
          std::copy_n(&ys[(m - 1 - i) * n], n, &ry[i * n]);
          std::copy_n(&dys[(m - 1 - i) * n], n, &rdy[i * n]);
        }
        sol.dense = DenseOutput(n, std::move(rt), std::move(ry), std::move(rdy));
      } else {
        sol.dense = DenseOutput(n, std::move(ts), std::move(ys), std::move(dys));
      }
    } else {
      std::vector<double> ft{t_end}, fy(y), fdy(k1);
      sol.dense = DenseOutput(n, std::move(ft), std::move(fy), std::move(fdy));
    }
    return sol;
  };

  if (t1 == t0) return finish(t0);

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  const double hmax = std::min(opts.max_step, span);

  auto scale = [&](double a, double b) {
    return opts.atol + opts.rtol * std::max(std::fabs(a), std::fabs(b));
  };

  double h = opts.first_step;
  if (h <= 0.0) {
    // Hairer & Wanner's starting-step heuristic
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double sc = scale(y[i], y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, hmax);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dir * h0 * k1[i];
    call(t0 + dir * h0, tmp, k2);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double sc = scale(y[i], y[i]);
      double v = (k2[i] - k1[i]) / sc;
      d2 += v * v;
    }
    d2 = std::sqrt(d2 / n) / h0;
    double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                          : std::pow(0.01 / std::max(d1, d2), 1.0 / 5);
    h = std::min({100 * h0, h1, hmax});
    if (!std::isfinite(h) || h <= 0) h = std::min(1e-6, hmax);
  }
  h = std::min(h, hmax);

  double t = t0;
  sol.stats.min_step = std::numeric_limits<double>::infinity();
  bool last_rejected = false;
  while (dir * (t1 - t) > 0) {
    if (sol.stats.accepted + sol.stats.rejected >= opts.max_steps) {
      throw IntegrationError("step budget exhausted at t=" + std::to_string(t));
    }
    bool final_step = false;
    if (h >= std::fabs(t1 - t)) {
      h = std::fabs(t1 - t);
      final_step = true;
    }
    if (h < 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t))) {
      throw IntegrationError("step size underflow at t=" + std::to_string(t));
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    call(t + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    call(t + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    call(t + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    call(t + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double tn = final_step ? t1 : t + hs;
    call(tn, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    call(tn, ynew, k7);

    double err = 0.0;
    bool finite = all_finite(ynew) && all_finite(k7);
    if (finite) {
      for (std::size_t i = 0; i < n; ++i) {
        double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        double r = ei / scale(y[i], ynew[i]);
        err += r * r;
      }
      err = std::sqrt(err / n);
      if (!std::isfinite(err)) finite = false;
    }

    if (!finite) {
      ++sol.stats.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      t = tn;
      y.swap(ynew);
      k1.swap(k7);
      ++sol.stats.accepted;
      sol.stats.min_step = std::min(sol.stats.min_step, h);
      sol.stats.max_step = std::max(sol.stats.max_step, h);
      if (opts.dense) {
        ts.push_back(t);
        ys.insert(ys.end(), y.begin(), y.end());
        dys.insert(dys.end(), k1.begin(), k1.end());
      }
      if (observer) observer(t, y);
      double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, hmax);
      last_rejected = false;
    } else {
      ++sol.stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  if (sol.stats.accepted == 0) sol.stats.min_step = 0.0;
  return finish(t);
}

}  // namespace exactrd
