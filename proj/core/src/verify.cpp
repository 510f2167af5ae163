#include "exactrd/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

#include "exactrd/error.hpp"

namespace exactrd {

void Grid::validate() const {
  if (nx < 3 || nt < 3) throw PreconditionError("grid needs at least 3 nodes per axis");
  if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && x_lo < x_hi))
    throw PreconditionError("grid x range must satisfy x_lo < x_hi");
  if (!(std::isfinite(t_lo) && std::isfinite(t_hi) && t_lo < t_hi))
    throw PreconditionError("grid t range must satisfy t_lo < t_hi");
}

double Grid::x(int i) const {
  if (i == nx - 1) return x_hi;
  return x_lo + (x_hi - x_lo) * i / (nx - 1);
}

double Grid::t(int j) const {
  if (j == nt - 1) return t_hi;
  return t_lo + (t_hi - t_lo) * j / (nt - 1);
}

std::vector<double> Grid::xs() const {
  std::vector<double> v(nx);
  for (int i = 0; i < nx; ++i) v[i] = x(i);
  return v;
}

std::vector<double> Grid::ts() const {
  std::vector<double> v(nt);
  for (int j = 0; j < nt; ++j) v[j] = t(j);
  return v;
}

namespace {

// Five-point first-derivative weights (times 12) on offsets s..s+4, indexed
// by s + 4.
constexpr double kFirst[5][5] = {
    {3, -16, 36, -48, 25},
    {-1, 6, -18, 10, 3},
    {1, -8, 0, 8, -1},
    {-3, -10, 18, -6, 1},
    {-25, 48, -36, 16, -3},
};
constexpr double kSecond[5] = {-1, 16, -30, 16, -1};

// Samples of a vector field along one axis at offsets m * h / 2, m in [-8, 8].
class AxisSamples {
 public:
  AxisSamples(int arity, std::function<void(double, std::span<double>)> at, double h)
      : arity_(arity), at_(std::move(at)), h_(h), vals_(17 * arity), have_{} {}

  const double* get(int m) {
    int k = m + 8;
    if (!have_[k]) {
      at_(0.5 * m * h_, std::span<double>(vals_.data() + k * arity_, arity_));
      for (int c = 0; c < arity_; ++c)
        if (!std::isfinite(vals_[k * arity_ + c]))
          throw DomainError("non-finite field value", 0.0);
      have_[k] = true;
    }
    return vals_.data() + k * arity_;
  }

  void seed(int m, std::span<const double> v) {
    std::copy(v.begin(), v.end(), vals_.begin() + (m + 8) * arity_);
    have_[m + 8] = true;
  }

 private:
  int arity_;
  std::function<void(double, std::span<double>)> at_;
  double h_;
  std::vector<double> vals_;
  std::array<bool, 17> have_;
};

// first derivative, offsets s..s+4 in units of `scale` half-steps
double first(AxisSamples& s, int comp, int shift, int scale, double step) {
  const double* w = kFirst[shift + 4];
  double acc = 0.0;
  for (int j = 0; j < 5; ++j) {
    if (w[j] == 0.0) continue;
    acc += w[j] * s.get((shift + j) * scale)[comp];
  }
  return acc / (12.0 * step);
}

double second(AxisSamples& s, int comp, int scale, double step) {
  double acc = 0.0;
  for (int j = 0; j < 5; ++j) acc += kSecond[j] * s.get((j - 2) * scale)[comp];
  return acc / (12.0 * step * step);
}

int stencil_shift(double t, double h, const Interval& dom) {
  auto room = [&](double dist) {
    if (!std::isfinite(dist)) return 2;
    return static_cast<int>(std::clamp(std::floor(dist / h + 1e-9), 0.0, 2.0));
  };
  int lo = room(t - dom.lo), hi = room(dom.hi - t);
  if (lo < 2) return -lo;
  if (hi < 2) return -4 + hi;
  return -2;
}

}  // namespace

void field_derivs(const FieldSet& fields, double x, double t, double h_x, double h_t,
                  std::span<Jet> out, const Interval& t_domain, std::span<double> error) {
  const int n = fields.arity;
  if (static_cast<int>(out.size()) < n) throw PreconditionError("field_derivs: output too small");
  if (!(h_x > 0.0 && h_t > 0.0)) throw PreconditionError("field_derivs: steps must be positive");
  if (t_domain.span() < 4 * h_t) h_t = t_domain.span() / 4;

  std::vector<double> center(n);
  fields.eval(x, t, center);
  for (double v : center)
    if (!std::isfinite(v)) throw DomainError("non-finite field value", t);

  AxisSamples xs(n, [&](double dx, std::span<double> o) { fields.eval(x + dx, t, o); }, h_x);
  AxisSamples ts(n, [&](double dt, std::span<double> o) { fields.eval(x, t + dt, o); }, h_t);
  xs.seed(0, center);
  ts.seed(0, center);
  const int shift = stencil_shift(t, h_t, t_domain);

  for (int c = 0; c < n; ++c) {
    double fx1 = first(xs, c, -2, 2, h_x), fx2 = first(xs, c, -2, 1, 0.5 * h_x);
    double fxx1 = second(xs, c, 2, h_x), fxx2 = second(xs, c, 1, 0.5 * h_x);
    double ft1 = first(ts, c, shift, 2, h_t), ft2 = first(ts, c, shift, 1, 0.5 * h_t);
    Jet& j = out[c];
    j.f = center[c];
    j.fx = (16.0 * fx2 - fx1) / 15.0;
    j.fxx = (16.0 * fxx2 - fxx1) / 15.0;
    j.ft = (16.0 * ft2 - ft1) / 15.0;
    if (error.size() >= static_cast<std::size_t>(4 * (c + 1))) {
      error[4 * c] = 0.0;
      error[4 * c + 1] = std::fabs(j.fx - fx2);
      error[4 * c + 2] = std::fabs(j.fxx - fxx2);
      error[4 * c + 3] = std::fabs(j.ft - ft2);
    }
  }
}

ScalarDerivs field_derivs(const std::function<double(double, double)>& f, double x, double t,
                          double h_x, double h_t, const Interval& t_domain) {
  FieldSet fs{1, [&](double xx, double tt, std::span<double> o) { o[0] = f(xx, tt); }};
  Jet j;
  std::array<double, 4> err{};
  field_derivs(fs, x, t, h_x, h_t, std::span<Jet>(&j, 1), t_domain, err);
  return {{j.f, err[0]}, {j.fx, err[1]}, {j.fxx, err[2]}, {j.ft, err[3]}};
}

ResidualReport residual(const PdeSystem& system, const FieldSet& fields, const Grid& grid,
                        double tol, const ResidualOptions& opts) {
  grid.validate();
  const int n = system.arity();
  if (fields.arity != n) throw PreconditionError("field arity does not match the system");
  const double hx = opts.h_x > 0 ? opts.h_x : 1e-3 * (grid.x_hi - grid.x_lo);
  const double ht = opts.h_t > 0 ? opts.h_t : 2.5e-4 * (grid.t_hi - grid.t_lo);
  const std::vector<double> xs = grid.xs();

  // residuals of row j, node i, equation k at ((j * nx) + i) * n + k; NaN
  // marks a failed node
  const std::size_t nodes = static_cast<std::size_t>(grid.nx) * grid.nt;
  std::vector<double> res(nodes * n, 0.0);

  auto do_row = [&](int j) {
    const double t = grid.t(j);
    std::vector<Jet> jets(static_cast<std::size_t>(grid.nx) * n);
    std::vector<char> ok(grid.nx, 1);
    for (int i = 0; i < grid.nx; ++i) {
      try {
        field_derivs(fields, xs[i], t, hx, ht, std::span<Jet>(jets.data() + i * n, n),
                     opts.t_domain);
      } catch (const std::exception&) {
        ok[i] = 0;
      }
    }
    std::vector<double> gx;
    std::vector<Jet> gj;
    for (int i = 0; i < grid.nx; ++i) {
      if (!ok[i]) continue;
      gx.push_back(xs[i]);
      gj.insert(gj.end(), jets.begin() + i * n, jets.begin() + (i + 1) * n);
    }
    std::vector<double> rhs(gx.size() * n);
    bool rhs_ok = true;
    try {
      if (!gx.empty()) system.rhs(t, gx, gj, rhs);
    } catch (const std::exception&) {
      rhs_ok = false;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::size_t g = 0;
    for (int i = 0; i < grid.nx; ++i) {
      double* r = res.data() + (static_cast<std::size_t>(j) * grid.nx + i) * n;
      if (!ok[i] || !rhs_ok) {
        std::fill(r, r + n, nan);
        if (ok[i]) ++g;
        continue;
      }
      for (int k = 0; k < n; ++k) r[k] = gj[g * n + k].ft - rhs[g * n + k];
      ++g;
    }
  };

  const int threads = std::clamp(opts.threads, 1, grid.nt);
  if (threads == 1) {
    for (int j = 0; j < grid.nt; ++j) do_row(j);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int j = w; j < grid.nt; j += threads) do_row(j);
      });
    for (auto& th : pool) th.join();
  }

  ResidualAccumulator acc(system.equation_names(), tol);
  for (int j = 0; j < grid.nt; ++j)
    for (int i = 0; i < grid.nx; ++i)
      acc.add(std::span<const double>(res.data() + (static_cast<std::size_t>(j) * grid.nx + i) * n,
                                      n),
              xs[i], grid.t(j));
  return acc.finish();
}

}  // namespace exactrd
