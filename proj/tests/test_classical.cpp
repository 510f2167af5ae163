#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "exactrd/classical.hpp"
#include "exactrd/error.hpp"

using namespace exactrd;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

ClassicalSolution fig3() { return dlv2(2, 1, kSqrt2, kSqrt2, 2, 2, Dlv2Branch::NuRatio); }

std::array<double, 3> at(const ClassicalSolution& s, double xi, double tau) {
  std::array<double, 3> o{};
  s.eval(xi, tau, std::span<double>(o.data(), s.arity()));
  return o;
}

}  // namespace

TEST(LinearRD, FigureParametersAtOrigin) {
  auto s = linear_rd(1, 100, 1);
  auto v = at(s, 0, 0);
  EXPECT_EQ(v[0], 2.0);
  EXPECT_EQ(v[1], 99.0);
  EXPECT_EQ(s.arity(), 2);
  EXPECT_EQ(s.family(), Family::LinearRD);
}

TEST(LinearRD, EqualDecayRatesKillSecondField) {
  auto s = linear_rd(1, 3, 3);
  for (double x : {-1.0, 0.3, 2.0})
    for (double t : {0.0, 0.5})
      EXPECT_EQ(at(s, x, t)[1], 0.0);
}

TEST(LinearRD, NodesOfCosine) {
  auto s = linear_rd(1, 100, 1);
  for (double t : {0.0, 0.7}) {
    auto v = at(s, std::numbers::pi / 2, t);
    EXPECT_NEAR(v[0], 0.0, 1e-15);
    EXPECT_NEAR(v[1], 0.0, 1e-14);
  }
}

TEST(LinearRD, ResidualAndNegativeControl) {
  auto s = linear_rd(1, 100, 1);
  Grid g{-2 * std::numbers::pi, 2 * std::numbers::pi, 101, 0.0, 2.0, 101};
  auto rep = residual_constant_system(s, g, 1e-6);
  EXPECT_TRUE(rep.pass) << rep.max_residual();
  auto bad = residual_constant_system(s.perturbed(0.01), g, 1e-6);
  EXPECT_FALSE(bad.pass);
  EXPECT_GE(bad.max_residual(), 1e-3);
}

TEST(DLV2, FigureThreeConstants) {
  auto s = fig3();
  EXPECT_NEAR(s.param("nu0"), 0.5, 1e-15);
  EXPECT_NEAR(s.param("nu1"), -kSqrt2 / 4, 1e-15);
  EXPECT_NEAR(s.param("A"), 1.0, 1e-15);
  EXPECT_NEAR(s.param("B"), kSqrt2 / 2, 1e-15);
}

TEST(DLV2, FarFieldAheadOfFront) {
  auto s = fig3();
  auto v = at(s, 400.0, 1.0);
  EXPECT_NEAR(v[0], 0.0, 1e-12);
  EXPECT_NEAR(v[1], 0.5, 1e-12);
}

TEST(DLV2, ExclusionClassification) {
  auto s = fig3();
  ASSERT_TRUE(s.asymptotic().has_value());
  const auto& a = *s.asymptotic();
  EXPECT_EQ(a.regime, AsymptoticRegime::Exclusion);
  EXPECT_NEAR(a.u, kSqrt2, 1e-15);
  EXPECT_EQ(a.v, 0.0);
  EXPECT_EQ(a.A_hat, 2.0);
}

TEST(DLV2, ExclusionLimitReachedAtLargeTime) {
  auto s = fig3();
  const auto& a = *s.asymptotic();
  for (int i = 0; i <= 100; ++i) {
    double xi = -10 + 0.2 * i;
    auto v = at(s, xi, 50.0);
    EXPECT_LE(std::fabs(v[0] - 2 / kSqrt2) + std::fabs(v[1]), 1e-3) << xi;
    EXPECT_LE(std::fabs(v[0] - a.u) + std::fabs(v[1] - a.v), 1e-3);
  }
}

TEST(DLV2, CoexistenceBranch) {
  // B^ = 2 > A^ = 1 > C^ = 1/2
  double a1 = 1, a2 = 1, b1 = 2, b2 = 1, c1 = 1, c2 = 2;
  auto s = dlv2(a1, a2, b1, b2, c1, c2, Dlv2Branch::NuZero);
  ASSERT_TRUE(s.asymptotic().has_value());
  const auto& a = *s.asymptotic();
  EXPECT_EQ(a.regime, AsymptoticRegime::Coexistence);
  double Bh = b1 / b2, Ch = c1 / c2;
  double u_inf = a1 * (Ch - 1) / (b2 * (Ch - Bh)), v_inf = a1 * (1 - Bh) / (c2 * (Ch - Bh));
  EXPECT_NEAR(a.u, u_inf, 1e-15);
  EXPECT_NEAR(a.v, v_inf, 1e-15);
  EXPECT_NEAR(u_inf, 1.0 / 3, 1e-15);
  for (double xi : {-10.0, 0.0, 10.0}) {
    auto v = at(s, xi, 50.0);
    EXPECT_NEAR(v[0], u_inf, 1e-3);
    EXPECT_NEAR(v[1], v_inf, 1e-3);
  }
  EXPECT_TRUE(residual_constant_system(s).pass);
}

TEST(DLV2, UnknownRegimeWhenOrderConditionFails) {
  // A^ = 1 but B^ = C^ order condition violated: B^ = 2, C^ = 3
  auto s = dlv2(1, 1, 2, 1, 3, 1, Dlv2Branch::NuZero);
  EXPECT_EQ(s.asymptotic()->regime, AsymptoticRegime::Unknown);
}

TEST(DLV2, Preconditions) {
  EXPECT_THROW(dlv2(2, 1, 1, 2, 1, 2, Dlv2Branch::NuZero), PreconditionError);  // a1 != a2
  EXPECT_THROW(dlv2(1, 1, 1, 2, 2, 2, Dlv2Branch::NuZero), PreconditionError);  // c1 = c2
  EXPECT_THROW(dlv2(1, 1, 1, 1, 2, 0, Dlv2Branch::NuRatio), PreconditionError);  // c2 = 0
  EXPECT_THROW(dlv2(1, 2, 1, 1, 1, 1, Dlv2Branch::NuRatio), PreconditionError);  // A < 0
  EXPECT_THROW(dlv2(1, 1, 1, 2, 1, 3, Dlv2Branch::NuRatio), PreconditionError);  // not a wave
}

TEST(DLV2, Residual) {
  auto s = fig3();
  Grid g{-10, 10, 101, 0, 3, 101};
  auto rep = residual_constant_system(s, g, 1e-6);
  EXPECT_TRUE(rep.pass) << rep.max_residual();
}

TEST(DLV3, LimitsAlongTheFront) {
  double a1 = 4, th = 1;
  auto s = dlv3(a1, th);
  auto ahead = at(s, 60.0, 0.0);
  EXPECT_NEAR(ahead[0], 0.0, 1e-12);
  EXPECT_NEAR(ahead[1], a1, 1e-12);
  EXPECT_NEAR(ahead[2], 0.0, 1e-12);
  auto behind = at(s, -60.0, 0.0);
  EXPECT_NEAR(behind[0], 4 * (2 + th - a1 / 4), 1e-12);
  EXPECT_NEAR(behind[1], 0.0, 1e-12);
  EXPECT_NEAR(behind[2], 2 * (a1 - th - 2), 1e-12);
}

TEST(DLV3, DerivedConstants) {
  auto s = dlv3(4, 1);
  EXPECT_NEAR(s.param("b2"), 2.5, 1e-15);
  EXPECT_NEAR(s.param("b3"), 0.25, 1e-15);
  EXPECT_NEAR(s.param("c1"), 4.0, 1e-15);
  EXPECT_NEAR(s.param("c3"), 1.5, 1e-15);
  EXPECT_NEAR(s.param("e1"), -2.0, 1e-15);
  EXPECT_NEAR(s.param("e2"), 2.0, 1e-15);
  EXPECT_EQ(s.param("b1"), 1.0);
  EXPECT_EQ(s.param("c2"), 1.0);
  EXPECT_EQ(s.param("e3"), 1.0);
}

TEST(DLV3, PositivityBruteForce) {
  auto s = dlv3(4, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xi(-15, 15), tau(-5, 5);
  for (int i = 0; i < 10000; ++i) {
    auto v = at(s, xi(rng), tau(rng));
    EXPECT_GT(v[0], 0.0);
    EXPECT_GT(v[1], 0.0);
    EXPECT_GT(v[2], 0.0);
  }
}

TEST(DLV3, ConstraintViolations) {
  EXPECT_THROW(dlv3(3, 1), PreconditionError);
  EXPECT_THROW(dlv3(12, 1), PreconditionError);
  EXPECT_THROW(dlv3(2, 1), PreconditionError);
}

TEST(DLV3, ResidualAcrossConstraintRange) {
  for (double th : {0.0, 1.0, 2.5})
    for (double frac : {0.1, 0.5, 0.9}) {
      double a1 = (th + 2) + frac * 3 * (th + 2);
      auto rep = residual_constant_system(dlv3(a1, th));
      EXPECT_TRUE(rep.pass) << "a1=" << a1 << " theta=" << th << " max=" << rep.max_residual();
    }
}

TEST(GrayScott, ThetaAtOneEighth) {
  auto s = gray_scott(0.125);
  double theta = std::sqrt(2.0) * (1 - 3 * std::sqrt(0.5)) / 4;
  EXPECT_NEAR(s.param("theta"), theta, 1e-15);
  EXPECT_NEAR(s.param("theta"), -0.396447, 1e-6);
}

TEST(GrayScott, SumIsOne) {
  for (double b1 : {0.01, 0.125, 0.2, 0.25}) {
    auto s = gray_scott(b1);
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        auto v = at(s, -20 + 0.4 * i, 0.1 * j);
        EXPECT_NEAR(v[0] + v[1], 1.0, 1e-12);
      }
  }
}

TEST(GrayScott, DegenerateDiscriminant) {
  auto s = gray_scott(0.25);
  EXPECT_NEAR(s.param("amplitude"), 0.25, 1e-15);
  auto v = at(s, 0.0, 0.0);
  EXPECT_EQ(v[0], 0.75);
  EXPECT_TRUE(std::isfinite(at(s, 3.0, 2.0)[0]));
  EXPECT_TRUE(residual_constant_system(s).pass);
}

TEST(GrayScott, RangeErrors) {
  try {
    gray_scott(0.3);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_STREQ(e.what(), "b1 out of (0, 1/4]");
  }
  EXPECT_THROW(gray_scott(0.0), PreconditionError);
  EXPECT_THROW(gray_scott(0.1, 0.2), PreconditionError);
}

TEST(GrayScott, Residual) {
  for (double b1 : {0.05, 0.125, 0.2}) {
    auto rep = residual_constant_system(gray_scott(b1));
    EXPECT_TRUE(rep.pass) << b1 << " " << rep.max_residual();
  }
}

TEST(Burgers, CaptionConstant) {
  auto s = burgers(2, 1, 2, 2, {BurgersMode::Printed, -1.0, {}, {}});
  EXPECT_NEAR(s.param("A"), 111.0 / 8, 1e-14);
  auto o = burgers(2, 1, 2, 2, {BurgersMode::Printed, -1.0, -111.0 / 8, {}});
  EXPECT_NEAR(o.param("A"), -111.0 / 8, 1e-14);
}

TEST(Burgers, ValueOnTheZeroLocus) {
  BurgersOptions opt{BurgersMode::Printed, -1.0, {}, {}};
  auto s = burgers(2, 1, 2, 2, opt);
  double A = s.param("A");
  double tau = 0.01;
  double xi = (10 + 2 * A * tau) / 20;  // 20 xi - 10 - 2 A tau = 0
  auto v = at(s, xi, tau);
  EXPECT_NEAR(v[0], -1.0, 1e-12);
  EXPECT_NEAR(v[1], 0.0, 1e-12);
}

TEST(Burgers, AmplitudeRatio) {
  for (double B : {-1.0, 1.0, 2.5}) {
    auto s = burgers(2, 1, 2, 2, {BurgersMode::Printed, B, {}, {}});
    double A = s.param("A");
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        auto v = at(s, 0.45 + 0.002 * i, 0.001 * j);
        if (std::fabs(v[1]) <= 1e-6) continue;
        EXPECT_NEAR((v[0] - B) / v[1], -2 * A / B, 1e-10 * std::fabs(2 * A / B));
      }
  }
}

TEST(Burgers, ExactWaveResidual) {
  for (double A : {1.0 / 40, -1.0 / 40, 0.1}) {
    auto s = burgers(2, 1, 2, 2, {BurgersMode::Exact, -1.0, A, {}});
    auto rep = residual_constant_system(s);
    EXPECT_TRUE(rep.pass) << A << " " << rep.max_residual();
  }
}

TEST(Burgers, ExactWaveSpeedAndLevels) {
  // b1=2, b2=1, c1=c2=2: s/q = 2/3, r = 2B/3, omega = 14 B k / 3
  double B = -1, A = 1.0 / 40, k = 20 * A;
  auto s = burgers(2, 1, 2, 2, {BurgersMode::Exact, B, A, {}});
  EXPECT_NEAR(s.param("r"), 2 * B / 3, 1e-15);
  EXPECT_NEAR(s.param("omega"), 14 * B * k / 3, 1e-15);
  EXPECT_NEAR(s.param("q"), -3 * k / 7, 1e-15);
  EXPECT_NEAR(s.param("s"), -2 * k / 7, 1e-15);
}

TEST(Burgers, PrintedFormOnItsConsistentFamily) {
  // b2 = 20 c2 b1, c1 = 20 c2 (b1 - c2), A = 10 c2 B, K = 20 / (2 c2 - b1)
  double c2 = 0.05, b1 = 1, B = 0.1;
  double b2 = 20 * c2 * b1, c1 = 20 * c2 * (b1 - c2);
  auto s = burgers(b1, b2, c1, c2, {BurgersMode::Printed, B, 10 * c2 * B, 20 / (2 * c2 - b1)});
  auto rep = residual_constant_system(s);
  EXPECT_TRUE(rep.pass) << rep.max_residual();
}

TEST(Burgers, PrintedFormIsNotAGeneralSolution) {
  auto s = burgers(2, 1, 2, 2, {BurgersMode::Printed, -1.0, -1.0 / 40, {}});
  EXPECT_FALSE(residual_constant_system(s).pass);
}

TEST(Burgers, Preconditions) {
  EXPECT_THROW(burgers(1, 1, 0, 1), PreconditionError);
  EXPECT_THROW(burgers(1, 1, 1, 0), PreconditionError);
  EXPECT_THROW(burgers(4, 1, 1, 1, {BurgersMode::Exact, 1.0, 0.1, {}}), PreconditionError);
}

TEST(Classical, FamilyNames) {
  for (Family f : {Family::LinearRD, Family::DLV2, Family::DLV3, Family::GrayScott,
                   Family::Burgers})
    EXPECT_EQ(family_from_name(family_name(f)), f);
  EXPECT_THROW(family_from_name("brusselator"), PreconditionError);
}
