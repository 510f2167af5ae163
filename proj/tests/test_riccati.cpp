#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "exactrd/error.hpp"
#include "exactrd/riccati.hpp"

using namespace exactrd;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

CoeffSet ex_linear() { return CoeffSet::parse("1", "0", "-1", "-1"); }

// Integrate the Riccati system itself (not the multiparameter formulas).
std::vector<double> direct(const CoeffSet& cs, const RiccatiInit& in, double t_end) {
  OdeRhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    double a = cs.a(t), b = cs.b(t), c = cs.c(t), d = cs.d(t), f = cs.f(t), g = cs.g(t);
    double al = y[0], be = y[1], de = y[3];
    dy[0] = -b + 2 * c * al + 4 * a * al * al;
    dy[1] = (c + 4 * a * al) * be;
    dy[2] = a * be * be;
    dy[3] = -2 * al * g + (c + 4 * a * al) * de + f;
    dy[4] = (2 * a * de - g) * be;
    dy[5] = a * de * de - g * de;
    dy[6] = -y[6] * (4 * a * al + 2 * d);
  };
  double y0[7] = {in.alpha, in.beta, in.gamma, in.delta, in.epsilon, in.kappa, in.mu};
  OdeOptions o;
  o.rtol = 1e-13;
  o.atol = 1e-14;
  o.dense = false;
  return integrate_ode(rhs, in.t0, y0, t_end, o).y_final;
}

std::vector<double> as_vec(const RiccatiValues& r) {
  return {r.alpha, r.beta, r.gamma, r.delta, r.epsilon, r.kappa, r.mu};
}

CoeffSet general_coeffs() {
  return CoeffSet::parse("1 + 0.3*sin(t)", "0.2*cos(t)", "0.5 - 0.1*t", "0.3*sin(2*t)",
                         "0.4*cos(t)", "0.5 + 0.2*t");
}

}  // namespace

TEST(CharacteristicBasis, LinearExampleClosedForm) {
  auto b = build_characteristic(ex_linear(), {0.0, 3.0});
  for (double t : linspace(0.0, 3.0, 31)) {
    EXPECT_EQ(b->eta(t), 2.0);
    EXPECT_EQ(b->sigma(t), 0.0);
    EXPECT_LE(rel(b->mu0(t), std::expm1(2 * t)), 1e-8);
    EXPECT_LE(rel(b->mu1(t), 1.0), 1e-8);
    EXPECT_LE(rel(b->W(t), std::exp(t)), 1e-8);
  }
}

TEST(CharacteristicBasis, HeatKernel) {
  auto b = build_characteristic(CoeffSet::parse("1"), {0.0, 2.0});
  for (double t : linspace(0.0, 2.0, 21)) {
    EXPECT_NEAR(b->mu0(t), 2 * t, 1e-12);
    EXPECT_NEAR(b->mu1(t), 1.0, 1e-12);
    EXPECT_NEAR(b->W(t), 1.0, 1e-12);
    EXPECT_EQ(b->delta0(t), 0.0);
    EXPECT_EQ(b->epsilon0(t), 0.0);
    EXPECT_EQ(b->kappa0(t), 0.0);
  }
  Kernel k = kernel_at(*b, 1.0);
  EXPECT_NEAR(k.alpha0, -0.25, 1e-12);
  EXPECT_NEAR(k.beta0, 0.5, 1e-12);
  EXPECT_NEAR(k.gamma0, -0.25, 1e-12);
}

TEST(CharacteristicBasis, ConstantDiffusionHalf) {
  auto b = build_characteristic(CoeffSet::parse("0.5"), {0.0, 3.0});
  EXPECT_EQ(b->eta(1.0), 0.0);
  EXPECT_EQ(b->sigma(1.0), 0.0);
  for (double t : linspace(0.0, 3.0, 13)) EXPECT_NEAR(b->mu0(t), t, 1e-12);
}

TEST(CharacteristicBasis, InitialConditionsAndSourceLimits) {
  CoeffSet cs = general_coeffs();
  auto b = build_characteristic(cs, {0.0, 2.0});
  EXPECT_EQ(b->mu0(0.0), 0.0);
  EXPECT_EQ(b->dmu0(0.0), 2.0 * cs.a(0.0));
  EXPECT_EQ(b->mu1(0.0), 1.0);
  EXPECT_EQ(b->dmu1(0.0), 0.0);
  double d00 = cs.g(0.0) / (2 * cs.a(0.0));
  EXPECT_EQ(b->delta0(0.0), d00);
  EXPECT_EQ(b->epsilon0(0.0), -d00);
  EXPECT_EQ(b->kappa0(0.0), 0.0);
  // the quadratures approach their stated values continuously
  EXPECT_NEAR(b->delta0(1e-7), d00, 1e-5);
  EXPECT_NEAR(b->epsilon0(1e-7), -d00, 1e-5);
  EXPECT_NEAR(b->kappa0(1e-7), 0.0, 1e-5);
}

TEST(CharacteristicBasis, WronskianIdentity) {
  for (const CoeffSet& cs : {general_coeffs(), ex_linear(),
                             CoeffSet::parse("exp(-2*cos(t))", "-exp(2*cos(t))", "2-sin(t)", "1")}) {
    auto b = build_characteristic(cs, {-1.0, 3.0});
    for (double t : linspace(-1.0, 3.0, 81)) {
      double w = b->dmu0(t) * b->mu1(t) - b->mu0(t) * b->dmu1(t);
      EXPECT_LE(std::fabs(w / b->wronskian_expected(t) - 1.0), 1e-8) << t;
    }
  }
}

TEST(CharacteristicBasis, WronskianMatchesEtaIntegral) {
  // 2a(0)mu1(0) exp(int eta) computed by an independent quadrature of eta
  CoeffSet cs = general_coeffs();
  auto b = build_characteristic(cs, {0.0, 2.0});
  OdeRhs rhs = [&](double t, std::span<const double>, std::span<double> dy) { dy[0] = b->eta(t); };
  double y0[1] = {0.0};
  OdeOptions o;
  o.rtol = 1e-13;
  auto q = integrate_ode(rhs, 0.0, y0, 2.0, o);
  for (double t : {0.5, 1.0, 2.0}) {
    double expect = 2 * cs.a(0.0) * std::exp(q.dense.eval(0, t));
    double w = b->dmu0(t) * b->mu1(t) - b->mu0(t) * b->dmu1(t);
    EXPECT_LE(std::fabs(w / expect - 1.0), 1e-8);
  }
}

TEST(CharacteristicBasis, RejectsVanishingDiffusion) {
  EXPECT_THROW(build_characteristic(CoeffSet::parse("t"), {-1.0, 1.0}), PreconditionError);
  EXPECT_THROW(build_characteristic(CoeffSet::parse("1"), {0.0, 1.0}, 2.0), PreconditionError);
}

TEST(CharacteristicBasis, TurningPointWithSource) {
  // sigma = ab = -1 gives mu0 = sin(2t), whose derivative vanishes at pi/4
  EXPECT_THROW(build_characteristic(CoeffSet::parse("1", "-1", "", "", "", "1"), {0.0, 1.0}),
               TurningPointError);
  EXPECT_NO_THROW(build_characteristic(CoeffSet::parse("1", "-1"), {0.0, 1.0}));
}

TEST(KernelAt, LinearExample) {
  auto b = build_characteristic(ex_linear(), {0.0, 3.0});
  for (double t : linspace(0.1, 3.0, 30)) {
    Kernel k = kernel_at(*b, t);
    double e2 = std::expm1(2 * t);
    EXPECT_LE(rel(k.beta0, std::exp(t) / e2), 1e-8);
    EXPECT_LE(rel(k.gamma0, -1.0 / (2 * e2) - 0.5), 1e-8);
    EXPECT_EQ(k.delta0, 0.0);
    EXPECT_EQ(k.epsilon0, 0.0);
    EXPECT_EQ(k.kappa0, 0.0);
  }
  EXPECT_THROW(kernel_at(*b, 0.0), SingularPointError);
  EXPECT_THROW(kernel_at(*b, 4.0), PreconditionError);
}

TEST(Propagate, LinearExampleClosedForms) {
  RiccatiState s = solve_riccati(ex_linear(), {0.0, 3.0}, RiccatiInit{});
  for (double t : linspace(0.0, 3.0, 50)) {
    RiccatiValues r = s.at(t);
    EXPECT_LE(rel(r.beta, std::exp(-t)), 1e-8);
    EXPECT_LE(rel(r.gamma, std::exp(-t) * std::sinh(t)), 1e-8);
    EXPECT_LE(rel(r.mu, std::exp(2 * t)), 1e-8);
    EXPECT_NEAR(r.alpha, 0.0, 1e-8);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_EQ(r.epsilon, 0.0);
    EXPECT_EQ(r.kappa, 0.0);
  }
}

TEST(Propagate, ReturnsInitialDataAtAnchor) {
  RiccatiInit in{0.0, 2.0, -0.3, 1.5, 0.2, 0.7, -0.4, 0.9};
  RiccatiState s = solve_riccati(general_coeffs(), {0.0, 1.0}, in);
  RiccatiValues r = s.at(0.0);
  EXPECT_EQ(r.mu, in.mu);
  EXPECT_EQ(r.alpha, in.alpha);
  EXPECT_EQ(r.beta, in.beta);
  EXPECT_EQ(r.gamma, in.gamma);
  EXPECT_EQ(r.delta, in.delta);
  EXPECT_EQ(r.epsilon, in.epsilon);
  EXPECT_EQ(r.kappa, in.kappa);
}

TEST(Propagate, LotkaVolterraExampleClosedForms) {
  CoeffSet cs = CoeffSet::parse("0.5", "", "", "(tanh(t)-1)/2");
  RiccatiInit in;
  in.beta = std::sqrt(2.0);
  in.epsilon = 2.0;
  in.kappa = 1.0;
  RiccatiState s = solve_riccati(cs, {0.0, 3.0}, in);
  for (double t : linspace(0.0, 3.0, 50)) {
    RiccatiValues r = s.at(t);
    EXPECT_LE(rel(r.beta, std::sqrt(2.0)), 1e-8);
    EXPECT_LE(rel(r.gamma, t), 1e-8);
    EXPECT_LE(rel(r.mu, 1 + std::tanh(t)), 1e-8);
    EXPECT_EQ(r.epsilon, 2.0);
    EXPECT_EQ(r.kappa, 1.0);
  }
}

TEST(Propagate, GrayScottExampleClosedForms) {
  CoeffSet cs = CoeffSet::parse("tanh(t)", "4*tanh(t)", "0", "tanh(t)", "4*sinh(t)", "3*sinh(t)");
  const double t0 = 0.5;
  auto sech = [](double t) { return 1.0 / std::cosh(t); };
  RiccatiInit in{t0,
                 std::pow(std::cosh(t0), 2),
                 -1.0,
                 std::pow(sech(t0), 4),
                 -std::pow(sech(t0), 8) / 8,
                 2 * std::cosh(t0),
                 -std::pow(sech(t0), 3) / 3,
                 -std::pow(std::cosh(t0), 2)};
  RiccatiState s = solve_riccati(cs, {0.25, 2.5}, in);
  for (double t : linspace(0.25, 2.5, 50)) {
    RiccatiValues r = s.at(t);
    EXPECT_LE(rel(r.alpha, -1.0), 1e-8) << t;
    EXPECT_LE(rel(r.beta, std::pow(sech(t), 4)), 1e-8) << t;
    EXPECT_LE(rel(r.gamma, -std::pow(sech(t), 8) / 8), 1e-8) << t;
    EXPECT_LE(rel(r.delta, 2 * std::cosh(t)), 1e-8) << t;
    EXPECT_LE(rel(r.epsilon, -std::pow(sech(t), 3) / 3), 1e-8) << t;
    EXPECT_LE(rel(r.kappa, -std::pow(std::cosh(t), 2)), 1e-8) << t;
    EXPECT_LE(rel(r.mu, std::pow(std::cosh(t), 2)), 1e-8) << t;
  }
}

TEST(Propagate, BurgersExamplesClosedForms) {
  {
    CoeffSet cs = CoeffSet::parse("exp(-2*sin(t))", "", "cos(t)", "", "", "cos(t)");
    RiccatiState s = solve_riccati(cs, {0.0, 3.0}, RiccatiInit{});
    for (double t : linspace(0.0, 3.0, 50)) {
      RiccatiValues r = s.at(t);
      EXPECT_LE(rel(r.beta, std::exp(std::sin(t))), 1e-8);
      EXPECT_LE(rel(r.gamma, t), 1e-8);
      EXPECT_LE(rel(r.epsilon, 1 - std::exp(std::sin(t))), 1e-8);
      EXPECT_NEAR(r.alpha, 0.0, 1e-9);
      EXPECT_NEAR(r.delta, 0.0, 1e-9);
      EXPECT_NEAR(r.kappa, 0.0, 1e-9);
    }
  }
  {
    CoeffSet cs = CoeffSet::parse("exp(t)/cos(sin(t))^2", "", "-tan(sin(t))*cos(t)", "", "",
                                  "sin(t)/cos(sin(t))");
    RiccatiInit in;
    in.gamma = 1.0;
    in.epsilon = 1.0;
    RiccatiState s = solve_riccati(cs, {0.0, 2.0}, in);
    for (double t : linspace(0.0, 2.0, 50)) {
      RiccatiValues r = s.at(t);
      EXPECT_LE(rel(r.beta, std::cos(std::sin(t))), 1e-8);
      EXPECT_LE(rel(r.gamma, std::exp(t)), 1e-8);
      EXPECT_LE(rel(r.epsilon, std::cos(t)), 1e-8);
    }
  }
}

TEST(Propagate, MatchesDirectIntegrationForGeneralCoefficients) {
  CoeffSet cs = general_coeffs();
  RiccatiInit in{0.0, 1.3, -0.2, 0.8, 0.1, 0.4, -0.6, 0.25};
  RiccatiState s = solve_riccati(cs, {-0.5, 1.0}, in);
  for (double t : {-0.5, -0.2, 0.3, 0.7, 1.0}) {
    auto want = direct(cs, in, t);
    auto got = as_vec(s.at(t));
    for (int k = 0; k < 7; ++k) EXPECT_LE(rel(got[k], want[k]), 1e-7) << "t=" << t << " k=" << k;
  }
}

TEST(Propagate, BlowUpTruncatesInterval) {
  RiccatiInit in;
  in.alpha = 1.0;  // heat kernel: alpha = 1/(1-4t) blows up at t = 1/4
  RiccatiState s = solve_riccati(CoeffSet::parse("1"), {0.0, 1.0}, in);
  ASSERT_TRUE(s.blowup_hi().has_value());
  EXPECT_NEAR(*s.blowup_hi(), 0.25, 1e-10);
  EXPECT_LT(s.valid_interval().hi, 0.25);
  EXPECT_NEAR(s.at(0.2).alpha, 1.0 / (1 - 0.8), 1e-8);
  EXPECT_THROW(s.at(0.3), BlowUpError);
}

TEST(Propagate, InvalidInit) {
  auto b = build_characteristic(CoeffSet::parse("1"), {0.0, 1.0});
  RiccatiInit in;
  in.beta = 0.0;
  EXPECT_THROW(propagate(b, in), PreconditionError);
  in.beta = 1.0;
  in.mu = 0.0;
  EXPECT_THROW(propagate(b, in), PreconditionError);
  in.mu = 1.0;
  in.t0 = 0.5;
  EXPECT_THROW(propagate(b, in), PreconditionError);
}

TEST(SolveModified, ZeroSourceKeepsKappa2) {
  RiccatiState s = solve_modified(solve_riccati(CoeffSet::parse("1"), {0.0, 2.0}, {}),
                                  Expr(), 0.7);
  for (double t : linspace(0.0, 2.0, 11)) EXPECT_EQ(s.at(t).kappa2, 0.7);
}

TEST(SolveModified, ConstantSource) {
  RiccatiState s = solve_modified(solve_riccati(CoeffSet::parse("1"), {0.0, 2.0}, {}),
                                  Expr::constant(0.8), 0.0);
  for (double t : linspace(0.0, 2.0, 21)) {
    EXPECT_NEAR(s.at(t).kappa2, -std::log(std::fabs(0.8 * t + 1)), 1e-10);
  }
  // h = -1 from kappa2(0)=0 breaks down at t = 1
  RiccatiState br = solve_modified(solve_riccati(CoeffSet::parse("1"), {0.0, 2.0}, {}),
                                   Expr::constant(-1.0), 0.0);
  ASSERT_TRUE(br.blowup_hi());
  EXPECT_NEAR(*br.blowup_hi(), 1.0, 1e-10);
  EXPECT_THROW(br.at(1.5), BlowUpError);
}

TEST(SolveModified, OscillatingSource) {
  Expr h = parse("3*sin(6*t)*exp(sin(3*t)^2)");
  CoeffSet cs = CoeffSet::parse("0.5", "-2", "2", "0.5", "-6*sin(3*t)-2*cos(3*t)", "cos(3*t)");
  RiccatiInit in{0.0, 1.0, -1.0, 1.0, 0.0, 2.0, 0.0, -1.0};
  RiccatiState s = solve_modified(solve_riccati(cs, {0.0, 3.0}, in), h, 0.0);
  for (double t : linspace(0.0, 3.0, 61)) {
    RiccatiValues r = s.at(t);
    EXPECT_NEAR(r.kappa2, -std::pow(std::sin(3 * t), 2), 1e-9);
    EXPECT_EQ(r.kappa1, r.kappa - r.kappa2);
  }
}

TEST(VerifyRiccati, LinearExample) {
  RiccatiState s = solve_riccati(ex_linear(), {0.0, 3.0}, RiccatiInit{});
  auto ts = linspace(0.0, 3.0, 200);
  ResidualReport rep = verify_riccati(s, ts, 1e-7);
  EXPECT_TRUE(rep.pass) << rep.max_residual();
  EXPECT_EQ(rep.equations.size(), 7u);
  EXPECT_EQ(rep.nodes, 200u);
  EXPECT_EQ(rep.domain_failures, 0u);
}

TEST(VerifyRiccati, NegativeControl) {
  // a tiny diffusion keeps the state essentially constant; checking it
  // against a = 1 exposes gamma' - a beta^2 = -1
  RiccatiState s = solve_riccati(CoeffSet::parse("1e-12"), {0.0, 1.0}, RiccatiInit{});
  ResidualReport rep = verify_riccati(s, CoeffSet::parse("1"), linspace(0.0, 1.0, 20), 1e-7);
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.find("gamma")->max_abs, 1.0, 1e-6);
}

TEST(VerifyRiccati, GrayScottExample) {
  CoeffSet cs = CoeffSet::parse("tanh(t)", "4*tanh(t)", "0", "tanh(t)", "4*sinh(t)", "3*sinh(t)");
  const double t0 = 0.5;
  RiccatiInit in{t0,
                 std::pow(std::cosh(t0), 2),
                 -1.0,
                 std::pow(std::cosh(t0), -4),
                 -std::pow(std::cosh(t0), -8) / 8,
                 2 * std::cosh(t0),
                 -std::pow(std::cosh(t0), -3) / 3,
                 -std::pow(std::cosh(t0), 2)};
  RiccatiState s = solve_riccati(cs, {0.25, 2.5}, in);
  ResidualReport rep = verify_riccati(s, linspace(0.25, 2.5, 200), 1e-6);
  EXPECT_TRUE(rep.pass) << rep.max_residual();
}

TEST(VerifyRiccati, ModifiedSystem) {
  Expr h = parse("3*sin(6*t)*exp(sin(3*t)^2)");
  CoeffSet cs = CoeffSet::parse("0.5", "-2", "2", "0.5", "-6*sin(3*t)-2*cos(3*t)", "cos(3*t)");
  RiccatiInit in{0.0, 1.0, -1.0, 1.0, 0.0, 2.0, 0.0, -1.0};
  RiccatiState s = solve_modified(solve_riccati(cs, {0.0, 3.0}, in), h, 0.0);
  ResidualReport rep = verify_riccati(s, linspace(0.0, 3.0, 200), 1e-6);
  EXPECT_EQ(rep.equations.size(), 9u);
  EXPECT_TRUE(rep.pass) << rep.max_residual();
}

// ---------------------------------------------------------------- properties

TEST(RiccatiProperty, SmallTimeLimit) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  CoeffSet cs = general_coeffs();
  auto b = build_characteristic(cs, {0.0, 1.0});
  for (int i = 0; i < 50; ++i) {
    RiccatiInit in{0.0, 1 + 0.5 * u(rng), u(rng), 1.2 + u(rng), u(rng), u(rng), u(rng), u(rng)};
    RiccatiState s = propagate(b, in);
    auto got = as_vec(s.at(1e-6));
    std::vector<double> init = {in.alpha, in.beta, in.gamma, in.delta, in.epsilon, in.kappa, in.mu};
    for (int k = 0; k < 7; ++k) {
      EXPECT_LE(std::fabs(got[k] - init[k]), 1e-4 * (1 + std::fabs(init[k])));
    }
  }
}

TEST(RiccatiProperty, ReinitializationComposes) {
  CoeffSet cs = general_coeffs();
  RiccatiInit in{0.0, 1.3, -0.2, 0.8, 0.1, 0.4, -0.6, 0.25};
  RiccatiState first = solve_riccati(cs, {0.0, 2.0}, in);
  const double ts = 1.0;
  RiccatiValues mid = first.at(ts);
  RiccatiInit again{ts, mid.mu, mid.alpha, mid.beta, mid.gamma, mid.delta, mid.epsilon, mid.kappa};
  RiccatiState second = solve_riccati(cs, {ts, 2.0}, again);
  for (double s : linspace(0.05, 0.5, 10)) {
    auto a = as_vec(first.at(ts + s));
    auto c = as_vec(second.at(ts + s));
    for (int k = 0; k < 7; ++k) EXPECT_NEAR(a[k], c[k], 1e-6) << s << " " << k;
  }
}

TEST(RiccatiProperty, SubstitutionIdentity) {
  CoeffSet cs = general_coeffs();
  RiccatiInit in{0.0, 1.3, -0.2, 0.8, 0.1, 0.4, -0.6, 0.25};
  RiccatiState s = solve_riccati(cs, {0.0, 1.0}, in);
  for (double t : linspace(0.05, 0.95, 19)) {
    double h = 1e-3;
    double dmu = (s.at(t - 2 * h).mu - 8 * s.at(t - h).mu + 8 * s.at(t + h).mu -
                  s.at(t + 2 * h).mu) /
                 (12 * h);
    double a = cs.a(t), d = cs.d(t);
    double alpha = -dmu / (4 * a * s.at(t).mu) - d / (2 * a);
    EXPECT_NEAR(s.at(t).alpha, alpha, 1e-7);
  }
}

TEST(RiccatiProperty, BackwardTime) {
  RiccatiState s = solve_riccati(ex_linear(), {-1.0, 1.0}, RiccatiInit{});
  for (double t : linspace(-1.0, 1.0, 21)) {
    RiccatiValues r = s.at(t);
    EXPECT_LE(rel(r.beta, std::exp(-t)), 1e-8);
    EXPECT_LE(rel(r.mu, std::exp(2 * t)), 1e-8);
  }
}
