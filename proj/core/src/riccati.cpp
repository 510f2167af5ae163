#include "exactrd/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exactrd/error.hpp"
#include "exactrd/finite_diff.hpp"

namespace exactrd {

namespace {

// state layout of the augmented characteristic ODE
enum : std::size_t { kMu0, kDMu0, kMu1, kDMu1, kLnW, kI1, kI2, kI3, kDim };

std::string fmt(double v) { return std::to_string(v); }

// First sign change of fn scanning the node times outward from `from` in
// direction `dir`; returns the root refined by bisection.
template <class F>
std::optional<double> first_root(const F& fn, std::span<const double> nodes, double from,
                                 double limit, int dir) {
  double prev_t = from;
  double prev_v = fn(from);
  if (prev_v == 0.0) return from;
  auto scan = [&](double t) -> std::optional<double> {
    double v = fn(t);
    if (v == 0.0) return t;
    if (std::signbit(v) != std::signbit(prev_v)) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 200 && lo != hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double vm = fn(mid);
        if (vm == 0.0) return mid;
        if (std::signbit(vm) == std::signbit(prev_v)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return hi;
    }
    prev_t = t;
    prev_v = v;
    return std::nullopt;
  };
  if (dir > 0) {
    for (double t : nodes) {
      if (t <= from) continue;
      if (t > limit) break;
      if (auto r = scan(t)) return r;
    }
  } else {
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
      double t = *it;
      if (t >= from) continue;
      if (t < limit) break;
      if (auto r = scan(t)) return r;
    }
  }
  return std::nullopt;
}

OdeOptions capped(const BasisOptions& opts, double span) {
  OdeOptions o = opts.ode;
  if (opts.min_steps > 0 && span > 0) o.max_step = std::min(o.max_step, span / opts.min_steps);
  return o;
}

// Integrate y' = rhs from the anchor to both ends of iv and join the pieces.
OdeSolution two_sided(const OdeRhs& rhs, double anchor, std::span<const double> y0, Interval iv,
                      const OdeOptions& o) {
  OdeSolution fwd = integrate_ode(rhs, anchor, y0, iv.hi, o);
  if (iv.lo < anchor) {
    OdeSolution bwd = integrate_ode(rhs, anchor, y0, iv.lo, o);
    fwd.dense = DenseOutput::join(bwd.dense, fwd.dense);
    fwd.stats.accepted += bwd.stats.accepted;
    fwd.stats.rejected += bwd.stats.rejected;
    fwd.stats.rhs_evals += bwd.stats.rhs_evals;
    fwd.stats.min_step = std::min(fwd.stats.min_step, bwd.stats.min_step);
    fwd.stats.max_step = std::max(fwd.stats.max_step, bwd.stats.max_step);
  }
  return fwd;
}

}  // namespace

// ------------------------------------------------------------------ basis

std::shared_ptr<const CharacteristicBasis> CharacteristicBasis::build(const CoeffSet& coeffs,
                                                                      Interval iv, double anchor,
                                                                      const BasisOptions& opts) {
  if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi)) {
    throw PreconditionError("characteristic basis: empty or non-finite interval");
  }
  if (!iv.contains(anchor)) {
    throw PreconditionError("characteristic basis: anchor " + fmt(anchor) +
                            " outside the working interval");
  }
  coeffs.check_a_nonzero(iv);

  std::shared_ptr<CharacteristicBasis> b(new CharacteristicBasis(coeffs, iv, anchor));
  b->has_source_ = !(coeffs.f.is_zero() && coeffs.g.is_zero());
  CoeffValues va = b->ce_.at(anchor);
  b->a_anchor_ = va.a;
  b->d_anchor_ = va.d;
  b->g_anchor_ = va.g;

  const CoeffEval& ce = b->ce_;
  const bool src = b->has_source_;
  const bool positive = va.a > 0;
  bool turning = false;
  double turning_t = anchor;

  OdeRhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    CoeffValues v = ce.at(t);
    double eta = CoeffEval::eta(v);
    double sigma = CoeffEval::sigma(v);
    dy[kMu0] = y[kDMu0];
    dy[kDMu0] = eta * y[kDMu0] + 4.0 * sigma * y[kMu0];
    dy[kMu1] = y[kDMu1];
    dy[kDMu1] = eta * y[kDMu1] + 4.0 * sigma * y[kMu1];
    dy[kLnW] = v.c - 2.0 * v.d;
    if (!src) {
      dy[kI1] = dy[kI2] = dy[kI3] = 0.0;
      return;
    }
    double dmu0 = y[kDMu0];
    // mu0' starts at 2a(t_a); the source integrands need it to keep its sign
    if (dmu0 == 0.0 || (dmu0 > 0) != positive) {
      turning = true;
      turning_t = t;
      dy[kI1] = dy[kI2] = dy[kI3] = std::nan("");
      return;
    }
    double W = std::exp(y[kLnW]);
    double F = v.f + v.d * v.g / v.a;
    double wi1 = W * y[kI1];
    dy[kI1] = (F * y[kMu0] + v.g * dmu0 / (2.0 * v.a)) / W;
    dy[kI2] = -8.0 * v.a * sigma * W * wi1 / (dmu0 * dmu0) + 2.0 * v.a * W * F / dmu0;
    dy[kI3] = -4.0 * v.a * sigma * wi1 * wi1 / (dmu0 * dmu0) + 2.0 * v.a * wi1 * F / dmu0;
  };

  double y0[kDim] = {0.0, 2.0 * va.a, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  try {
    OdeSolution sol = two_sided(rhs, anchor, y0, iv, capped(opts, iv.span()));
    b->dense_ = std::move(sol.dense);
    b->stats_ = sol.stats;
  } catch (const IntegrationError&) {
    if (!src) throw;
    // The source integrands carry 1/mu0' and usually blow up before mu0'
    // actually changes sign; look for the turning point on the homogeneous
    // problem, which does not need them.
    if (!turning) {
      CoeffSet plain = coeffs;
      plain.f = Expr();
      plain.g = Expr();
      auto hom = build(plain, iv, anchor, opts);
      auto nodes = hom->dense().node_times();
      for (double t : nodes) {
        double v = hom->dmu0(t);
        if (v == 0.0 || (v > 0) != positive) {
          turning = true;
          turning_t = t;
          break;
        }
      }
    }
    if (turning) {
      throw TurningPointError("mu0' vanishes near t=" + fmt(turning_t) +
                              " while f or g is nonzero; kernel quadratures are undefined");
    }
    throw;
  }
  return b;
}

std::shared_ptr<const CharacteristicBasis> build_characteristic(const CoeffSet& coeffs,
                                                                Interval iv, double anchor,
                                                                const BasisOptions& opts) {
  return CharacteristicBasis::build(coeffs, iv, anchor, opts);
}

double CharacteristicBasis::W(double t) const { return std::exp(dense_.eval(kLnW, t)); }
double CharacteristicBasis::eta(double t) const { return CoeffEval::eta(ce_.at(t)); }
double CharacteristicBasis::sigma(double t) const { return CoeffEval::sigma(ce_.at(t)); }

double CharacteristicBasis::delta0(double t) const {
  if (t == anchor_) return g_anchor_ / (2.0 * a_anchor_);
  if (!has_source_) return 0.0;
  return W(t) * dense_.eval(kI1, t) / mu0(t);
}

double CharacteristicBasis::epsilon0(double t) const {
  if (t == anchor_) return -delta0(t);
  if (!has_source_) return 0.0;
  double a = ce_.set().a(t);
  return -2.0 * a * W(t) * delta0(t) / dmu0(t) + dense_.eval(kI2, t);
}

double CharacteristicBasis::kappa0(double t) const {
  if (t == anchor_ || !has_source_) return 0.0;
  double a = ce_.set().a(t);
  double d0 = delta0(t);
  return -a * mu0(t) * d0 * d0 / dmu0(t) + dense_.eval(kI3, t);
}

double CharacteristicBasis::wronskian_expected(double t) const {
  double w = W(t);
  return 2.0 * ce_.set().a(t) * w * w;
}

Kernel kernel_at(const CharacteristicBasis& b, double t) {
  if (!b.interval().contains(t)) {
    throw PreconditionError("kernel_at: t=" + fmt(t) + " outside the working interval");
  }
  double m0 = b.mu0(t);
  if (std::fabs(m0) < 1e-12 * std::max(1.0, std::fabs(2.0 * b.a_anchor_))) {
    throw SingularPointError("kernel_at: mu0 vanishes at t=" + fmt(t));
  }
  CoeffValues v = b.coeffs().at(t);
  double w = b.W(t);
  Kernel k{};
  k.alpha0 = -b.dmu0(t) / (4.0 * v.a * m0) - v.d / (2.0 * v.a);
  k.beta0 = w / m0;
  k.gamma0 = -b.mu1(t) / (2.0 * m0) + b.d_anchor_ / (2.0 * b.a_anchor_);
  k.delta0 = b.delta0(t);
  k.epsilon0 = b.epsilon0(t);
  k.kappa0 = b.kappa0(t);
  return k;
}

// ------------------------------------------------------------------ state

void RiccatiInit::validate() const {
  const double vals[] = {t0, mu, alpha, beta, gamma, delta, epsilon, kappa};
  for (double v : vals) {
    if (!std::isfinite(v)) throw PreconditionError("Riccati initial data must be finite");
  }
  if (mu == 0.0) throw PreconditionError("Riccati initial data: mu(t0) must be nonzero");
  if (beta == 0.0) throw PreconditionError("Riccati initial data: beta(t0) must be nonzero");
  if (kappa2 && !std::isfinite(*kappa2)) {
    throw PreconditionError("Riccati initial data: kappa2(t0) must be finite");
  }
}

RiccatiState::RiccatiState(std::shared_ptr<const CharacteristicBasis> basis, RiccatiInit init)
    : basis_(std::move(basis)), init_(init) {
  init_.validate();
  if (init_.t0 != basis_->anchor()) {
    throw PreconditionError("Riccati initial time " + fmt(init_.t0) +
                            " differs from the basis anchor " + fmt(basis_->anchor()));
  }
  p_ = 2.0 * init_.alpha + basis_->d_anchor_ / basis_->a_anchor_;
  valid_ = basis_->interval();

  const CharacteristicBasis& b = *basis_;
  auto mu_fn = [&](double t) { return init_.mu * (b.mu1(t) - p_ * b.mu0(t)); };
  auto nodes = b.dense().node_times();
  double tiny = 1e-9 * std::max(1.0, valid_.span());
  if (auto r = first_root(mu_fn, nodes, init_.t0, valid_.hi, +1)) {
    blow_hi_ = *r;
    valid_.hi = *r - tiny;
  }
  if (auto r = first_root(mu_fn, nodes, init_.t0, valid_.lo, -1)) {
    blow_lo_ = *r;
    valid_.lo = *r + tiny;
  }
}

void RiccatiState::check(double t) const {
  if (valid_.contains(t)) return;
  if ((blow_hi_ && t >= valid_.hi) || (blow_lo_ && t <= valid_.lo)) {
    throw BlowUpError("Riccati state blows up near t=" +
                      fmt(t >= valid_.hi ? *blow_hi_ : *blow_lo_) + "; requested t=" + fmt(t));
  }
  throw PreconditionError("Riccati state evaluated outside its interval at t=" + fmt(t));
}

double RiccatiState::dmu(double t) const {
  check(t);
  const CharacteristicBasis& b = *basis_;
  return init_.mu * (b.dmu1(t) - p_ * b.dmu0(t));
}

RiccatiValues RiccatiState::at(double t) const {
  check(t);
  RiccatiValues r{};
  if (t == init_.t0) {
    r = {init_.mu,    init_.alpha, init_.beta, init_.gamma,
         init_.delta, init_.epsilon, init_.kappa};
    if (modified_) {
      r.kappa2 = modified_->kappa2_0;
      r.kappa1 = init_.kappa - r.kappa2;
    }
    return r;
  }
  const CharacteristicBasis& b = *basis_;
  const double m = init_.mu;
  CoeffValues v = b.coeffs().at(t);
  double mu0 = b.mu0(t), dmu0 = b.dmu0(t);
  double mu = m * (b.mu1(t) - p_ * mu0);
  double dmu = m * (b.dmu1(t) - p_ * dmu0);
  double W = b.W(t);

  // The multiparameter formulas, rearranged with mu = -2 mu(t0) mu0 (alpha(t0)
  // + gamma0) and the Wronskian identity so that no term divides by mu0.
  r.mu = mu;
  r.alpha = -dmu / (4.0 * v.a * mu) - v.d / (2.0 * v.a);
  r.beta = init_.beta * m * W / mu;
  r.gamma = init_.gamma + init_.beta * init_.beta * m * mu0 / (2.0 * mu);
  if (b.has_source()) {
    double I1 = b.dense().eval(kI1, t);
    double I2 = b.dense().eval(kI2, t);
    double I3 = b.dense().eval(kI3, t);
    double q = init_.delta + I2;
    double Z = 2.0 * v.a * W * W * I1 / dmu0;
    r.delta = W * (I1 * dmu / (dmu0 * mu) + m * q / mu);
    r.epsilon = init_.epsilon + init_.beta * m * (mu0 * q - Z) / mu;
    r.kappa = init_.kappa + I3 + m * mu0 * q * q / (2.0 * mu) - m * q * Z / mu -
              Z * I1 * dmu / (2.0 * dmu0 * mu);
  } else {
    double q = init_.delta;
    r.delta = W * m * q / mu;
    r.epsilon = init_.epsilon + init_.beta * m * mu0 * q / mu;
    r.kappa = init_.kappa + m * mu0 * q * q / (2.0 * mu);
  }
  if (modified_) {
    double arg = modified_->integral.eval(0, t) + std::exp(-modified_->kappa2_0);
    r.kappa2 = -std::log(std::fabs(arg));
    r.kappa1 = r.kappa - r.kappa2;
  }
  return r;
}

RiccatiState RiccatiState::with_modified(const Expr& h, double kappa2_0) const {
  if (!std::isfinite(kappa2_0)) throw PreconditionError("kappa2(t0) must be finite");
  const CharacteristicBasis& b = *basis_;
  auto mod = std::make_shared<Modified>();
  mod->h = h;
  mod->kappa2_0 = kappa2_0;
  OdeRhs rhs = [&h](double t, std::span<const double>, std::span<double> dy) { dy[0] = h(t); };
  double y0[1] = {0.0};
  BasisOptions bo;
  OdeSolution sol = two_sided(rhs, init_.t0, y0, b.interval(), capped(bo, b.interval().span()));
  mod->integral = std::move(sol.dense);

  RiccatiState out = *this;
  out.init_.kappa2 = kappa2_0;
  out.modified_ = mod;
  const double c0 = std::exp(-kappa2_0);
  auto arg = [&](double t) { return mod->integral.eval(0, t) + c0; };
  auto nodes = mod->integral.node_times();
  double tiny = 1e-9 * std::max(1.0, b.interval().span());
  if (auto r = first_root(arg, nodes, init_.t0, out.valid_.hi, +1)) {
    if (*r - tiny < out.valid_.hi) {
      out.blow_hi_ = *r;
      out.valid_.hi = *r - tiny;
    }
  }
  if (auto r = first_root(arg, nodes, init_.t0, out.valid_.lo, -1)) {
    if (*r + tiny > out.valid_.lo) {
      out.blow_lo_ = *r;
      out.valid_.lo = *r + tiny;
    }
  }
  return out;
}

RiccatiState propagate(std::shared_ptr<const CharacteristicBasis> basis, const RiccatiInit& init) {
  return RiccatiState(std::move(basis), init);
}

RiccatiState solve_modified(const RiccatiState& state, const Expr& h, double kappa2_0) {
  return state.with_modified(h, kappa2_0);
}

RiccatiState solve_riccati(const CoeffSet& coeffs, Interval iv, const RiccatiInit& init,
                           const BasisOptions& opts) {
  return RiccatiState(CharacteristicBasis::build(coeffs, iv, init.t0, opts), init);
}

// ------------------------------------------------------------------ verify

ResidualReport verify_riccati(const RiccatiState& s, const CoeffSet& coeffs,
                              std::span<const double> ts, double tol) {
  std::vector<std::string> names = {"mu",    "alpha",   "beta", "gamma",
                                    "delta", "epsilon", "kappa"};
  const bool mod = s.is_modified();
  if (mod) {
    names.push_back("kappa1");
    names.push_back("kappa2");
  }
  ResidualAccumulator acc(names, tol);
  CoeffEval ce(coeffs);
  const Interval& iv = s.valid_interval();
  const double h = 1e-3 * std::max(iv.span(), 1e-6);

  using Getter = double (*)(const RiccatiValues&);
  static constexpr Getter getters[] = {
      [](const RiccatiValues& r) { return r.mu; },      [](const RiccatiValues& r) { return r.alpha; },
      [](const RiccatiValues& r) { return r.beta; },    [](const RiccatiValues& r) { return r.gamma; },
      [](const RiccatiValues& r) { return r.delta; },   [](const RiccatiValues& r) { return r.epsilon; },
      [](const RiccatiValues& r) { return r.kappa; },   [](const RiccatiValues& r) { return r.kappa1; },
      [](const RiccatiValues& r) { return r.kappa2; },
  };

  std::vector<double> res(names.size());
  for (double t : ts) {
    try {
      RiccatiValues r = s.at(t);
      CoeffValues v = ce.at(t);
      double dv[9];
      for (std::size_t k = 0; k < names.size(); ++k) {
        Getter gk = getters[k];
        dv[k] = fd_first([&](double tt) { return gk(s.at(tt)); }, t, h, iv.lo, iv.hi).value;
      }
      double lin = v.c + 4.0 * v.a * r.alpha;
      res[0] = dv[0] + r.mu * (4.0 * v.a * r.alpha + 2.0 * v.d);
      res[1] = dv[1] + v.b - 2.0 * v.c * r.alpha - 4.0 * v.a * r.alpha * r.alpha;
      res[2] = dv[2] - lin * r.beta;
      res[3] = dv[3] - v.a * r.beta * r.beta;
      res[4] = dv[4] + 2.0 * r.alpha * v.g - lin * r.delta - v.f;
      res[5] = dv[5] - (2.0 * v.a * r.delta - v.g) * r.beta;
      res[6] = dv[6] - (v.a * r.delta * r.delta - v.g * r.delta);
      if (mod) {
        double hv = (*s.h())(t);
        res[7] = dv[7] - (v.a * r.delta * r.delta - v.g * r.delta + hv * std::exp(r.kappa2));
        res[8] = dv[8] + hv * std::exp(r.kappa2);
      }
      acc.add(res, std::nan(""), t);
    } catch (const Error&) {
      acc.add_failure();
    }
  }
  return acc.finish();
}

ResidualReport verify_riccati(const RiccatiState& s, std::span<const double> ts, double tol) {
  return verify_riccati(s, s.coeffs(), ts, tol);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 0) return v;
  if (n == 1) return {lo};
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace exactrd
