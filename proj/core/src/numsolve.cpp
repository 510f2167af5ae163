#include "exactrd/numsolve.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "exactrd/error.hpp"
#include "exactrd/transform.hpp"

namespace exactrd {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void MolProblem::validate() const {
  if (!system) throw PreconditionError("MoL problem has no system");
  if (!exact.eval || exact.arity != system->arity()) {
    throw PreconditionError("MoL problem: exact fields do not match the system arity");
  }
  if (nx < 11) throw PreconditionError("MoL problem needs nx >= 11, got " + std::to_string(nx));
  if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
    throw PreconditionError("MoL problem: x range must be finite with x_lo < x_hi");
  }
  if (!(t0 <= t1) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw PreconditionError("MoL problem: time span must be finite with t0 <= t1");
  }
  if (!valid.contains(t0) || !valid.contains(t1)) {
    throw PreconditionError("MoL problem: [" + fmt(t0) + ", " + fmt(t1) +
                            "] leaves the valid interval [" + fmt(valid.lo) + ", " +
                            fmt(valid.hi) + "]");
  }
}

MolProblem MolProblem::from_solution(const GeneralizedSolution& sol, double x_lo, double x_hi,
                                     int nx, double t0, double t1) {
  MolProblem p;
  p.system = sol.system_ptr();
  p.exact = sol.fields();
  p.x_lo = x_lo;
  p.x_hi = x_hi;
  p.nx = nx;
  p.t0 = t0;
  p.t1 = t1;
  p.valid = sol.state().valid_interval();
  return p;
}

MolResult integrate(const MolProblem& p, const MolOptions& opts) {
  p.validate();
  const int n = p.exact.arity;
  const int nx = p.nx;
  const int ni = nx - 2;
  const double h = p.dx();

  MolResult r;
  r.arity = n;
  r.t1 = p.t1;
  r.x.resize(nx);
  for (int i = 0; i < nx; ++i) r.x[i] = p.x(i);

  std::vector<double> y0(static_cast<std::size_t>(ni) * n);
  r.exact.resize(static_cast<std::size_t>(nx) * n);
  for (int i = 0; i < nx; ++i) p.exact.eval(r.x[i], p.t0, {r.exact.data() + i * n, std::size_t(n)});
  std::copy(r.exact.begin() + n, r.exact.end() - n, y0.begin());

  r.linf_component.assign(n, 0.0);
  if (p.t1 == p.t0) {
    r.numeric = r.exact;
    for (double v : r.exact) r.max_abs_exact = std::max(r.max_abs_exact, std::abs(v));
    return r;
  }

  const std::vector<double> xs_in(r.x.begin() + 1, r.x.end() - 1);
  // scratch shared by the stages of one integration (sequential)
  std::vector<double> full(static_cast<std::size_t>(nx) * n);
  std::vector<Jet> jets(static_cast<std::size_t>(ni) * n);
  const bool upwind = p.scheme == SpatialScheme::Upwind1;

  OdeRhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    p.exact.eval(p.x_lo, t, {full.data(), std::size_t(n)});
    p.exact.eval(p.x_hi, t, {full.data() + (nx - 1) * n, std::size_t(n)});
    std::copy(y.begin(), y.end(), full.begin() + n);
    for (int i = 1; i <= ni; ++i) {
      for (int k = 0; k < n; ++k) {
        double fl = full[(i - 1) * n + k], fc = full[i * n + k], fr = full[(i + 1) * n + k];
        Jet& j = jets[(i - 1) * n + k];
        j.f = fc;
        j.fx = upwind ? (fc - fl) / h : (fr - fl) / (2.0 * h);
        j.fxx = (fr - 2.0 * fc + fl) / (h * h);
      }
    }
    p.system->rhs(t, xs_in, jets, dy);
  };

  OdeOptions o;
  o.rtol = opts.rtol;
  o.atol = opts.atol;
  o.dense = false;
  double last_t = p.t0;
  OdeObserver obs = [&](double t, std::span<const double>) { last_t = t; };
  OdeSolution sol;
  try {
    sol = integrate_ode(rhs, p.t0, y0, p.t1, o, obs);
  } catch (const IntegrationError& e) {
    throw IntegrationError("MoL integration failed (stiffness or non-finite state) on nx=" +
                           std::to_string(nx) + ", x in [" + fmt(p.x_lo) + ", " + fmt(p.x_hi) +
                           "], last accepted t=" + fmt(last_t) + ": " + e.what());
  }
  r.stats = sol.stats;

  r.numeric.resize(r.exact.size());
  for (int i = 0; i < nx; ++i) p.exact.eval(r.x[i], p.t1, {r.exact.data() + i * n, std::size_t(n)});
  std::copy(r.exact.begin(), r.exact.begin() + n, r.numeric.begin());
  std::copy(r.exact.end() - n, r.exact.end(), r.numeric.end() - n);
  std::copy(sol.y_final.begin(), sol.y_final.end(), r.numeric.begin() + n);

  double sq = 0.0;
  for (std::size_t i = 0; i < r.numeric.size(); ++i) {
    double e = std::abs(r.numeric[i] - r.exact[i]);
    if (!std::isfinite(e)) {
      throw IntegrationError("MoL integration produced a non-finite value at x=" +
                             fmt(r.x[i / n]) + ", t=" + fmt(p.t1));
    }
    r.linf = std::max(r.linf, e);
    r.linf_component[i % n] = std::max(r.linf_component[i % n], e);
    r.max_abs_exact = std::max(r.max_abs_exact, std::abs(r.exact[i]));
    sq += e * e;
  }
  r.l2 = std::sqrt(h * sq);
  return r;
}

ConvergenceStudy convergence_study(const MolProblem& p, std::span<const int> nx_list,
                                   const MolOptions& opts, int threads) {
  if (nx_list.size() < 3) throw PreconditionError("convergence study needs at least 3 grids");
  for (std::size_t i = 1; i < nx_list.size(); ++i) {
    if (nx_list[i] <= nx_list[i - 1]) {
      throw PreconditionError("convergence study: nx list must be strictly increasing");
    }
  }
  const std::size_t m = nx_list.size();
  ConvergenceStudy st;
  st.rows.resize(m);
  std::vector<double> scale(m, 0.0);
  std::vector<std::exception_ptr> errs(m);
  auto run = [&](std::size_t i) {
    try {
      MolProblem q = p;
      q.nx = nx_list[i];
      MolResult r = integrate(q, opts);
      st.rows[i] = {q.nx, q.dx(), r.linf, r.l2, r.max_abs_exact};
      scale[i] = r.max_abs_exact;
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };
  const int w = std::clamp(threads, 1, static_cast<int>(m));
  if (w == 1) {
    for (std::size_t i = 0; i < m; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) {
      pool.emplace_back([&, k] {
        for (std::size_t i = k; i < m; i += w) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }

  const double noise =
      100.0 * (opts.rtol * *std::max_element(scale.begin(), scale.end()) + opts.atol);
  st.floor = std::all_of(st.rows.begin(), st.rows.end(),
                         [&](const ConvergenceRow& r) { return r.linf <= noise; });
  if (!st.floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : st.rows) {
      double lx = std::log(r.dx), ly = std::log(std::max(r.linf, 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    double k = static_cast<double>(m);
    st.order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  return st;
}

}  // namespace exactrd
