#include "exactrd/classical.hpp"

#include <cmath>
#include <functional>

#include "exactrd/error.hpp"

namespace exactrd {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::LinearRD:
      return "linear_rd";
    case Family::DLV2:
      return "dlv2";
    case Family::DLV3:
      return "dlv3";
    case Family::GrayScott:
      return "gray_scott";
    case Family::Burgers:
      return "burgers";
  }
  return "?";
}

Family family_from_name(std::string_view name) {
  for (Family f : {Family::LinearRD, Family::DLV2, Family::DLV3, Family::GrayScott,
                   Family::Burgers})
    if (family_name(f) == name) return f;
  throw PreconditionError("unknown family '" + std::string(name) + "'");
}

std::string_view regime_name(AsymptoticRegime r) {
  switch (r) {
    case AsymptoticRegime::Exclusion:
      return "converges-to-exclusion";
    case AsymptoticRegime::Coexistence:
      return "converges-to-coexistence";
    case AsymptoticRegime::Unknown:
      return "unknown";
  }
  return "?";
}

std::vector<std::string> ConstantSystem::equation_names() const {
  std::vector<std::string> n{"u", "v", "w"};
  n.resize(arity_);
  return n;
}

void ConstantSystem::reaction(std::span<const Jet> j, std::span<double> out) const {
  switch (family_) {
    case Family::LinearRD:
      out[0] = -k_.b[0] * j[0].f + j[1].f;
      out[1] = -k_.b[1] * j[1].f;
      return;
    case Family::DLV2:
    case Family::DLV3:
      for (int i = 0; i < arity_; ++i) {
        double r = k_.a[i] - k_.b[i] * j[0].f - k_.c[i] * j[1].f;
        if (arity_ == 3) r -= k_.e[i] * j[2].f;
        out[i] = j[i].f * r;
      }
      return;
    case Family::GrayScott: {
      double uvv = j[0].f * j[1].f * j[1].f;
      out[0] = -uvv + k_.b[0] * (1.0 - j[0].f);
      out[1] = uvv - k_.b[0] * j[1].f + k_.b[1];
      return;
    }
    case Family::Burgers: {
      double uv_x = j[0].fx * j[1].f + j[0].f * j[1].fx;
      out[0] = -k_.b[0] * j[0].f * j[0].fx - k_.c[0] * uv_x;
      out[1] = -k_.b[1] * j[1].f * j[1].fx - k_.c[1] * uv_x;
      return;
    }
  }
}

void ConstantSystem::rhs(double, std::span<const double> xs, std::span<const Jet> jets,
                         std::span<double> out) const {
  const double diff = diffusivity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto node = jets.subspan(i * arity_, arity_);
    auto o = out.subspan(i * arity_, arity_);
    reaction(node, o);
    for (int k = 0; k < arity_; ++k) o[k] += diff * node[k].fxx;
  }
}

double ClassicalSolution::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw PreconditionError("no parameter '" + name + "'");
  return it->second;
}

void ClassicalSolution::eval(double xi, double tau, std::span<double> out) const {
  (*fn_)(xi, tau, out);
}

FieldSet ClassicalSolution::fields() const {
  auto fn = fn_;
  return {arity(), [fn](double x, double t, std::span<double> o) { (*fn)(x, t, o); }};
}

ClassicalSolution ClassicalSolution::perturbed(double delta) const {
  ClassicalSolution s = *this;
  auto inner = fn_;
  s.fn_ = std::make_shared<const std::function<void(double, double, std::span<double>)>>(
      [inner, delta](double x, double t, std::span<double> o) {
        (*inner)(x, t, o);
        o[0] += delta;
      });
  return s;
}

namespace {

using Fn = std::function<void(double, double, std::span<double>)>;

std::shared_ptr<const Fn> make_fn(Fn f) { return std::make_shared<const Fn>(std::move(f)); }

void require_finite(std::initializer_list<double> vs, const char* what) {
  for (double v : vs)
    if (!std::isfinite(v)) throw PreconditionError(std::string(what) + ": parameters must be finite");
}

bool nearly(double a, double b) { return std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a) + std::fabs(b)); }

}  // namespace

ClassicalSolution linear_rd(double a1, double b1, double b2) {
  require_finite({a1, b1, b2}, "linear_rd");
  ClassicalSolution s;
  s.family_ = Family::LinearRD;
  s.params_ = {{"a1", a1}, {"b1", b1}, {"b2", b2}};
  ConstantCoeffs k;
  k.a[0] = k.a[1] = a1;
  k.b[0] = b1;
  k.b[1] = b2;
  s.system_ = std::make_shared<const ConstantSystem>(Family::LinearRD, 2, k);
  s.fn_ = make_fn([a1, b1, b2](double xi, double tau, std::span<double> o) {
    double c = std::cos(xi);
    double e1 = std::exp(-(b1 + a1) * tau), e2 = std::exp(-(b2 + a1) * tau);
    o[0] = (e1 + e2) * c;
    o[1] = (b1 - b2) * e2 * c;
  });
  s.grid_ = {-2 * M_PI, 2 * M_PI, 101, 0.0, 2.0, 101};
  return s;
}

ClassicalSolution dlv2(double a1, double a2, double b1, double b2, double c1, double c2,
                       Dlv2Branch branch) {
  require_finite({a1, a2, b1, b2, c1, c2}, "dlv2");
  double A, B, nu0, nu1;
  if (branch == Dlv2Branch::NuZero) {
    if (!nearly(a1, a2)) throw PreconditionError("dlv2 nu0-zero branch requires a1 = a2");
    if (nearly(c1, c2) || nearly(b1, b2))
      throw PreconditionError("dlv2 nu0-zero branch requires c1 != c2 and b1 != b2");
    nu0 = 0.0;
    A = a1;
    nu1 = (b1 - b2) / (c2 - c1);
    B = (c1 * b2 - b1 * c2) / (c1 - c2);
  } else {
    if (c2 == 0.0) throw PreconditionError("dlv2 nu0-ratio branch requires c2 != 0");
    nu0 = a2 / c2;
    A = a1 - a2 * c1 / c2;
    if (!nearly(c1, c2) && !nearly(b1, b2)) {
      nu1 = (b1 - b2) / (c2 - c1);
    } else if (nearly(c1, c2) && nearly(b1, b2)) {
      if (a1 == 0.0 || c1 == 0.0) throw PreconditionError("dlv2: a1 and c1 must be nonzero");
      nu1 = -a2 * b1 / (a1 * c1);
    } else {
      throw PreconditionError("dlv2 nu1 is undefined unless c1 != c2, b1 != b2 or c1 = c2, b1 = b2");
    }
    // the second equation only closes when nu1 A = -B nu0
    if (a1 != 0.0 && !nearly(nu1, -a2 * b1 / (a1 * c2)))
      throw PreconditionError("dlv2 nu0-ratio branch: parameters do not admit this wave");
    B = b1 + c1 * nu1;
  }
  if (!(A > 0.0)) throw PreconditionError("dlv2 requires A > 0");
  if (B == 0.0) throw PreconditionError("dlv2 requires B != 0");

  ClassicalSolution s;
  s.family_ = Family::DLV2;
  s.params_ = {{"a1", a1}, {"a2", a2}, {"b1", b1}, {"b2", b2}, {"c1", c1}, {"c2", c2},
               {"A", A},   {"B", B},   {"nu0", nu0}, {"nu1", nu1}};
  ConstantCoeffs k;
  k.a[0] = a1;
  k.a[1] = a2;
  k.b[0] = b1;
  k.b[1] = b2;
  k.c[0] = c1;
  k.c[1] = c2;
  s.system_ = std::make_shared<const ConstantSystem>(Family::DLV2, 2, k);
  const double kx = std::sqrt(A / 24.0), om = 5.0 * A / 12.0, amp = A / (4.0 * B);
  s.fn_ = make_fn([=](double xi, double tau, std::span<double> o) {
    double m = 2.0 / (1.0 + std::exp(2.0 * (kx * xi - om * tau)));
    double u = amp * m * m;
    o[0] = u;
    o[1] = nu0 + nu1 * u;
  });
  s.grid_ = {-10.0, 10.0, 101, 0.0, 3.0, 101};

  AsymptoticState as;
  as.A_hat = a1 / a2;
  as.B_hat = b1 / b2;
  as.C_hat = c1 / c2;
  if (branch == Dlv2Branch::NuRatio) {
    if (as.A_hat > std::max(as.B_hat, as.C_hat)) {
      as.regime = AsymptoticRegime::Exclusion;
      as.u = a1 / b1;
      as.v = 0.0;
    }
  } else {
    bool one = nearly(as.A_hat, 1.0);
    if (one && ((as.B_hat > 1.0 && 1.0 > as.C_hat) || (as.C_hat > 1.0 && 1.0 > as.B_hat))) {
      as.regime = AsymptoticRegime::Coexistence;
      as.u = a1 * (as.C_hat - 1.0) / (b2 * (as.C_hat - as.B_hat));
      as.v = a1 * (1.0 - as.B_hat) / (c2 * (as.C_hat - as.B_hat));
    }
  }
  s.asym_ = as;
  return s;
}

ClassicalSolution dlv3(double a1, double theta) {
  require_finite({a1, theta}, "dlv3");
  if (!(theta + 2.0 < a1 && a1 < 4.0 * (theta + 2.0)))
    throw PreconditionError("dlv3 requires theta + 2 < a1 < 4 (theta + 2)");
  const double d1 = 8.0 - a1 + 4.0 * theta, d2 = 2.0 + theta - a1;
  if (d1 == 0.0 || d2 == 0.0 || a1 == 0.0)
    throw PreconditionError("dlv3: vanishing denominator in the derived constants");
  ConstantCoeffs k;
  k.a[0] = k.a[1] = k.a[2] = a1;
  k.b[0] = 1.0;
  k.b[1] = -(a1 - 24.0) / d1;
  k.b[2] = -(a1 - 4.0 - 2.0 * theta) / d1;
  k.c[0] = -(4.0 * theta - a1 - 16.0) / a1;
  k.c[1] = 1.0;
  k.c[2] = -(2.0 * theta - a1 - 4.0) / a1;
  k.e[0] = -(a1 - 4.0 - 2.0 * theta) / d2;
  k.e[1] = -(a1 - 4.0 + 2.0 * theta) / d2;
  k.e[2] = 1.0;

  ClassicalSolution s;
  s.family_ = Family::DLV3;
  s.params_ = {{"a1", a1},     {"theta", theta}, {"b1", k.b[0]}, {"b2", k.b[1]},
               {"b3", k.b[2]}, {"c1", k.c[0]},   {"c2", k.c[1]}, {"c3", k.c[2]},
               {"e1", k.e[0]}, {"e2", k.e[1]},   {"e3", k.e[2]}};
  s.system_ = std::make_shared<const ConstantSystem>(Family::DLV3, 3, k);
  const double cu = 2.0 + theta - a1 / 4.0, cv = a1 / 4.0, cw = a1 - theta - 2.0;
  s.fn_ = make_fn([=](double xi, double tau, std::span<double> o) {
    // 1 -+ tanh z written without cancellation so the fields stay positive
    double z = xi - theta * tau;
    double m = 2.0 / (1.0 + std::exp(2.0 * z)), p = 2.0 / (1.0 + std::exp(-2.0 * z));
    o[0] = cu * m * m;
    o[1] = cv * p * p;
    o[2] = cw * m;
  });
  s.grid_ = {-5.0, 5.0, 101, 0.0, 2.0, 101};
  return s;
}

ClassicalSolution gray_scott(double b1, double b2) {
  require_finite({b1, b2}, "gray_scott");
  if (!(b1 > 0.0 && b1 <= 0.25)) throw PreconditionError("b1 out of (0, 1/4]");
  if (b2 != 0.0) throw PreconditionError("gray_scott closed form requires b2 = 0");
  const double sq = std::sqrt(1.0 - 4.0 * b1);
  const double amp = std::sqrt(2.0 + 2.0 * sq - 4.0 * b1) / 4.0;
  const double kx = std::sqrt(1.0 + sq - 2.0 * b1) / 4.0;
  const double theta = std::sqrt(2.0) * (1.0 - 3.0 * sq) / 4.0;
  const double u0 = (3.0 - sq) / 4.0, v0 = (1.0 + sq) / 4.0;

  ClassicalSolution s;
  s.family_ = Family::GrayScott;
  s.params_ = {{"b1", b1}, {"b2", b2}, {"theta", theta}, {"amplitude", amp}, {"k", kx}};
  ConstantCoeffs k;
  k.b[0] = b1;
  k.b[1] = b2;
  s.system_ = std::make_shared<const ConstantSystem>(Family::GrayScott, 2, k);
  s.fn_ = make_fn([=](double xi, double tau, std::span<double> o) {
    double T = std::tanh(kx * (xi - theta * tau));
    o[0] = u0 - amp * T;
    o[1] = v0 + amp * T;
  });
  s.grid_ = {-20.0, 20.0, 101, 0.0, 5.0, 101};
  return s;
}

ClassicalSolution burgers(double b1, double b2, double c1, double c2, const BurgersOptions& opts) {
  require_finite({b1, b2, c1, c2, opts.B}, "burgers");
  if (c1 == 0.0 || c2 == 0.0) throw PreconditionError("burgers requires c1 != 0 and c2 != 0");
  const double A = opts.A.value_or(4.0 * c1 * c2 - 1.0 / (4.0 * c1) - 2.0);
  const double B = opts.B;
  if (!std::isfinite(A) || A == 0.0) throw PreconditionError("burgers requires a finite A != 0");

  ClassicalSolution s;
  s.family_ = Family::Burgers;
  ConstantCoeffs k;
  k.b[0] = b1;
  k.b[1] = b2;
  k.c[0] = c1;
  k.c[1] = c2;
  s.system_ = std::make_shared<const ConstantSystem>(Family::Burgers, 2, k);
  const double kx = 20.0 * A, phase = -10.0 * A;
  double omega;

  if (opts.mode == BurgersMode::Printed) {
    const double K = opts.K.value_or(2.0 * c1 - 1.0 / (4.0 * c1 * c2) - 1.0);
    if (!std::isfinite(K)) throw PreconditionError("burgers: non-finite amplitude factor");
    omega = 2.0 * A * A;
    s.params_ = {{"b1", b1}, {"b2", b2}, {"c1", c1}, {"c2", c2}, {"A", A}, {"B", B}, {"K", K}};
    s.fn_ = make_fn([=](double xi, double tau, std::span<double> o) {
      double T = std::tanh(A * (20.0 * xi - 10.0 - 2.0 * A * tau));
      o[0] = B - 2.0 * A * K * T;
      o[1] = B * K * T;
    });
  } else {
    const double det = b1 * b2 - 4.0 * c1 * c2;
    if (det == 0.0) throw PreconditionError("burgers exact wave requires b1 b2 != 4 c1 c2");
    const double q = -2.0 * kx * (b2 - 2.0 * c1) / det;
    const double sv = -2.0 * kx * (b1 - 2.0 * c2) / det;
    const double den = q * (c1 * sv - b2 * sv - c2 * q);
    if (den == 0.0) throw PreconditionError("burgers exact wave: degenerate parameters");
    const double r = B * sv * (c2 * q - b1 * q - c1 * sv) / den;
    if (q != 0.0)
      omega = kx * (b1 * B + c1 * (r + B * sv / q));
    else
      omega = kx * (b2 * r + c2 * (q * r / sv + B));
    s.params_ = {{"b1", b1}, {"b2", b2}, {"c1", c1}, {"c2", c2}, {"A", A},
                 {"B", B},   {"q", q},   {"r", r},   {"s", sv}, {"omega", omega}};
    s.fn_ = make_fn([=](double xi, double tau, std::span<double> o) {
      double T = std::tanh(kx * xi + phase - omega * tau);
      o[0] = B + q * T;
      o[1] = r + sv * T;
    });
  }
  // front at xi = 1/2 moving with speed omega / kx; cover a few widths
  const double width = 1.0 / std::fabs(kx);
  const double tspan = std::min(2.0, 4.0 / std::max(std::fabs(omega), 1e-12));
  const double drift = omega / kx * tspan;
  const double lo = 0.5 + std::min(0.0, drift) - 8.0 * width;
  const double hi = 0.5 + std::max(0.0, drift) + 8.0 * width;
  s.grid_ = {lo, hi, 101, 0.0, tspan, 101};
  return s;
}

ResidualReport residual_constant_system(const ClassicalSolution& sol, const Grid& grid, double tol,
                                        int threads) {
  ResidualOptions o;
  o.threads = threads;
  return residual(sol.system(), sol.fields(), grid, tol, o);
}

ResidualReport residual_constant_system(const ClassicalSolution& sol, double tol) {
  return residual_constant_system(sol, sol.standard_grid(), tol);
}

}  // namespace exactrd
