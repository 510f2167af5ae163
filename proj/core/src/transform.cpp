#include "exactrd/transform.hpp"

#include <cmath>
#include <sstream>

#include "exactrd/error.hpp"
#include "exactrd/finite_diff.hpp"

namespace exactrd {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_family(const ClassicalSolution& c, Family f, std::string_view builder) {
  if (c.family() != f) {
    throw PreconditionError(std::string(builder) + " needs a " + std::string(family_name(f)) +
                            " solution, got " + std::string(family_name(c.family())));
  }
}

double inv_sqrt_mu(double mu, double t) {
  if (!(mu > 0.0)) throw DomainError("mu^(-1/2)", t);
  return 1.0 / std::sqrt(mu);
}

int index_of(std::string_view name, char prefix) {
  if (name.size() != 2 || name[0] != prefix || name[1] < '1' || name[1] > '3') return -1;
  return name[1] - '1';
}

}  // namespace

std::string_view kind_name(GeneralizedKind k) {
  switch (k) {
    case GeneralizedKind::LinearRD: return "linear_rd";
    case GeneralizedKind::Exponential: return "exponential";
    case GeneralizedKind::DLV2: return "dlv2";
    case GeneralizedKind::DLV3: return "dlv3";
    case GeneralizedKind::GrayScott: return "gray_scott";
    case GeneralizedKind::Burgers: return "burgers";
  }
  return "?";
}

SimilarityMap similarity_map(const RiccatiState& state, double x, double t, bool reduced) {
  RiccatiValues v = state.at(t);
  SimilarityMap m{};
  m.xi = v.beta * x + v.epsilon;
  m.tau = v.gamma;
  if (reduced) {
    m.prefactor = v.beta;
  } else {
    m.prefactor = inv_sqrt_mu(v.mu, t) * std::exp((v.alpha * x + v.delta) * x + v.kappa);
  }
  return m;
}

GeneralizedSystem::GeneralizedSystem(GeneralizedKind kind, RiccatiState state, ConstantCoeffs k,
                                     int arity, std::optional<Expr> h)
    : kind_(kind), state_(std::move(state)), base_(state_.coeffs()), k_(k), arity_(arity),
      h_(std::move(h)) {
  if (kind_ == GeneralizedKind::Exponential && !h_) {
    throw PreconditionError("exponential system needs h(t)");
  }
}

std::vector<std::string> GeneralizedSystem::equation_names() const {
  if (arity_ == 3) return {"psi", "phi", "phi3"};
  return {"psi", "phi"};
}

GeneralizedSystem::TimeData GeneralizedSystem::time_data(double t) const {
  TimeData d;
  d.cv = base_.at(t);
  d.st = state_.at(t);
  // derived coefficients always follow the state's own a(t)
  d.ab2 = state_.coeffs().a.eval(t) * d.st.beta * d.st.beta;
  if (h_) d.hval = h_->eval(t);
  return d;
}

std::vector<std::string> GeneralizedSystem::coefficient_names() const {
  switch (kind_) {
    case GeneralizedKind::LinearRD: return {"h", "L1", "L2"};
    case GeneralizedKind::Exponential: return {"h"};
    case GeneralizedKind::DLV2: return {"L1", "L2", "h1", "h2", "r1", "r2"};
    case GeneralizedKind::DLV3:
      return {"L1", "L2", "L3", "h1", "h2", "h3", "r1", "r2", "r3", "s1", "s2", "s3"};
    case GeneralizedKind::GrayScott: return {"L1", "h1", "M1", "M2"};
    case GeneralizedKind::Burgers: return {};
  }
  return {};
}

double GeneralizedSystem::coefficient(std::string_view name, double x, double t) const {
  TimeData d = time_data(t);
  auto unknown = [&]() -> double {
    throw PreconditionError("no coefficient '" + std::string(name) + "' in a " +
                            std::string(kind_name(kind_)) + " system");
  };
  switch (kind_) {
    case GeneralizedKind::LinearRD:
      if (name == "h") return d.ab2;
      if (name == "L1") return -k_.b[0] * d.ab2;
      if (name == "L2") return -k_.b[1] * d.ab2;
      return unknown();
    case GeneralizedKind::Exponential:
      if (name == "h") return d.hval;
      return unknown();
    case GeneralizedKind::DLV2:
    case GeneralizedKind::DLV3: {
      int i = -1;
      const double* row = nullptr;
      if ((i = index_of(name, 'L')) >= 0 && i < arity_) return k_.a[i] * d.ab2;
      if ((i = index_of(name, 'h')) >= 0) row = k_.b;
      else if ((i = index_of(name, 'r')) >= 0) row = k_.c;
      else if ((i = index_of(name, 's')) >= 0 && arity_ == 3) row = k_.e;
      if (!row || i >= arity_) return unknown();
      double p = inv_sqrt_mu(d.st.mu, t) * std::exp(S(d, x));
      return -row[i] * d.ab2 / p;
    }
    case GeneralizedKind::GrayScott: {
      double p = inv_sqrt_mu(d.st.mu, t) * std::exp(S(d, x));
      if (name == "L1") return -k_.b[0] * d.ab2;
      if (name == "h1") return d.ab2 / (p * p);
      if (name == "M1") return k_.b[0] * d.ab2 * p;
      if (name == "M2") return k_.b[1] * d.ab2 * p;
      return unknown();
    }
    case GeneralizedKind::Burgers:
      return unknown();
  }
  return unknown();
}

void GeneralizedSystem::rhs(double t, std::span<const double> xs, std::span<const Jet> jets,
                            std::span<double> out) const {
  const TimeData d = time_data(t);
  const CoeffValues& c = d.cv;
  const int n = arity_;

  if (kind_ == GeneralizedKind::Burgers) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const Jet& p = jets[i * n];
      const Jet& q = jets[i * n + 1];
      const double prod_x = p.fx * q.f + p.f * q.fx;
      for (int k = 0; k < 2; ++k) {
        const Jet& f = jets[i * n + k];
        out[i * n + k] = c.a * f.fxx - k_.b[k] * c.a * f.f * f.fx - k_.c[k] * c.a * prod_x +
                         c.c * (f.f + x * f.fx) - c.g * f.fx;
      }
    }
    return;
  }

  double L[3] = {0, 0, 0};
  switch (kind_) {
    case GeneralizedKind::LinearRD:
      L[0] = -k_.b[0] * d.ab2;
      L[1] = -k_.b[1] * d.ab2;
      break;
    case GeneralizedKind::DLV2:
    case GeneralizedKind::DLV3:
      for (int k = 0; k < n; ++k) L[k] = k_.a[k] * d.ab2;
      break;
    case GeneralizedKind::GrayScott:
      L[0] = L[1] = -k_.b[0] * d.ab2;
      break;
    default:
      break;
  }
  const double mu_part = (kind_ == GeneralizedKind::DLV2 || kind_ == GeneralizedKind::DLV3 ||
                          kind_ == GeneralizedKind::GrayScott)
                             ? inv_sqrt_mu(d.st.mu, t)
                             : 1.0;

  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const Jet* f = &jets[i * n];
    double* o = &out[i * n];
    // a f_xx - (b x^2 - d - L - x f) f - (g - c x) f_x
    for (int k = 0; k < n; ++k) {
      o[k] = c.a * f[k].fxx - (c.b * x * x - c.d - L[k] - x * c.f) * f[k].f -
             (c.g - c.c * x) * f[k].fx;
    }
    switch (kind_) {
      case GeneralizedKind::LinearRD:
        o[0] += d.ab2 * f[1].f;
        break;
      case GeneralizedKind::Exponential:
        o[0] += d.hval * f[1].f;
        break;
      case GeneralizedKind::DLV2:
      case GeneralizedKind::DLV3: {
        const double scale = -d.ab2 / (mu_part * std::exp(S(d, x)));
        for (int k = 0; k < n; ++k) {
          double s = k_.b[k] * f[0].f + k_.c[k] * f[1].f;
          if (n == 3) s += k_.e[k] * f[2].f;
          o[k] += scale * f[k].f * s;
        }
        break;
      }
      case GeneralizedKind::GrayScott: {
        const double p = mu_part * std::exp(S(d, x));
        const double h1 = d.ab2 / (p * p);
        const double cubic = h1 * f[0].f * f[1].f * f[1].f;
        o[0] += -cubic + k_.b[0] * d.ab2 * p;
        o[1] += cubic + k_.b[1] * d.ab2 * p;
        break;
      }
      default:
        break;
    }
  }
}

GeneralizedSystem GeneralizedSystem::with_base_coeffs(const CoeffSet& cs) const {
  GeneralizedSystem copy = *this;
  copy.base_ = CoeffEval(cs);
  return copy;
}

namespace {

GeneralizedSolution build_transformed(GeneralizedKind kind, const RiccatiState& state,
                                      const ClassicalSolution& classical) {
  const int n = classical.arity();
  auto sys = std::make_shared<const GeneralizedSystem>(kind, state, classical.system().coeffs(), n);
  FieldSet fs{n, [state, classical, n](double x, double t, std::span<double> out) {
                SimilarityMap m = similarity_map(state, x, t);
                classical.eval(m.xi, m.tau, out);
                for (int k = 0; k < n; ++k) out[k] *= m.prefactor;
              }};
  return GeneralizedSolution(std::move(sys), std::move(fs), classical);
}

}  // namespace

GeneralizedSolution build_linear_rd(const RiccatiState& state, const ClassicalSolution& classical) {
  require_family(classical, Family::LinearRD, "build_linear_rd");
  if (classical.param("a1") != 1.0) {
    throw PreconditionError("build_linear_rd needs a1 = 1, got a1 = " + fmt(classical.param("a1")));
  }
  if (state.is_modified()) {
    throw PreconditionError("build_linear_rd needs an unmodified Riccati state");
  }
  return build_transformed(GeneralizedKind::LinearRD, state, classical);
}

GeneralizedSolution build_exponential(const RiccatiState& state, double y) {
  if (!state.is_modified()) {
    throw PreconditionError("build_exponential needs a state with kappa1/kappa2");
  }
  if (!std::isfinite(y)) throw PreconditionError("y must be finite");
  auto sys = std::make_shared<const GeneralizedSystem>(GeneralizedKind::Exponential, state,
                                                       ConstantCoeffs{}, 2, *state.h());
  FieldSet fs{2, [state, y](double x, double t, std::span<double> out) {
                RiccatiValues v = state.at(t);
                double e = (v.alpha * x + v.beta * y + v.delta) * x + (v.gamma * y + v.epsilon) * y +
                           v.kappa1;
                out[0] = inv_sqrt_mu(v.mu, t) * std::exp(e);
                out[1] = out[0] * std::exp(v.kappa2);
              }};
  return GeneralizedSolution(std::move(sys), std::move(fs), std::nullopt, y);
}

GeneralizedSolution build_dlv2(const RiccatiState& state, const ClassicalSolution& classical) {
  require_family(classical, Family::DLV2, "build_dlv2");
  return build_transformed(GeneralizedKind::DLV2, state, classical);
}

GeneralizedSolution build_dlv3(const RiccatiState& state, const ClassicalSolution& classical) {
  require_family(classical, Family::DLV3, "build_dlv3");
  return build_transformed(GeneralizedKind::DLV3, state, classical);
}

GeneralizedSolution build_gray_scott(const RiccatiState& state, const ClassicalSolution& classical) {
  require_family(classical, Family::GrayScott, "build_gray_scott");
  return build_transformed(GeneralizedKind::GrayScott, state, classical);
}

GeneralizedSolution build_burgers(const RiccatiState& state, const ClassicalSolution& classical,
                                  double tol) {
  require_family(classical, Family::Burgers, "build_burgers");
  const Interval iv = state.valid_interval();
  const CoeffEval& ce = state.coeff_eval();
  const double h = 1e-3 * iv.span();
  auto beta = [&](double t) { return state.at(t).beta; };
  auto gamma = [&](double t) { return state.at(t).gamma; };
  auto eps = [&](double t) { return state.at(t).epsilon; };
  double worst = 0.0, at = iv.lo;
  for (double t : linspace(iv.lo, iv.hi, 200)) {
    CoeffValues c = ce.at(t);
    double b = beta(t);
    double r[3] = {fd_first(beta, t, h, iv.lo, iv.hi).value - c.c * b,
                   fd_first(gamma, t, h, iv.lo, iv.hi).value - c.a * b * b,
                   fd_first(eps, t, h, iv.lo, iv.hi).value + c.g * b};
    for (double v : r) {
      if (!(std::abs(v) <= worst)) {
        worst = std::abs(v);
        at = t;
      }
    }
  }
  if (!(worst <= tol)) {
    throw PreconditionError("state does not satisfy the reduced Riccati system: residual " +
                            fmt(worst) + " at t=" + fmt(at));
  }

  auto sys = std::make_shared<const GeneralizedSystem>(GeneralizedKind::Burgers, state,
                                                       classical.system().coeffs(), 2);
  FieldSet fs{2, [state, classical](double x, double t, std::span<double> out) {
                SimilarityMap m = similarity_map(state, x, t, true);
                classical.eval(m.xi, m.tau, out);
                out[0] *= m.prefactor;
                out[1] *= m.prefactor;
              }};
  return GeneralizedSolution(std::move(sys), std::move(fs), classical);
}

GeneralizedSolution build_generalized(const RiccatiState& state, const ClassicalSolution& classical) {
  switch (classical.family()) {
    case Family::LinearRD: return build_linear_rd(state, classical);
    case Family::DLV2: return build_dlv2(state, classical);
    case Family::DLV3: return build_dlv3(state, classical);
    case Family::GrayScott: return build_gray_scott(state, classical);
    case Family::Burgers: return build_burgers(state, classical);
  }
  throw PreconditionError("unknown family");
}

RiccatiState identity_state(Interval iv) {
  RiccatiInit init;
  init.t0 = iv.contains(0.0) ? 0.0 : iv.lo;
  init.gamma = init.t0;
  return solve_riccati(CoeffSet::parse("1"), iv, init);
}

}  // namespace exactrd
