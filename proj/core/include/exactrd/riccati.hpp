#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "exactrd/coeffs.hpp"
#include "exactrd/expr.hpp"
#include "exactrd/ode.hpp"
#include "exactrd/report.hpp"

namespace exactrd {

struct BasisOptions {
  OdeOptions ode{};
  /// The step is capped at interval span / min_steps so that the cubic
  /// Hermite dense output stays accurate to well below the residual
  /// tolerances of the downstream checks.
  int min_steps = 16000;
};

/// Kernel values at a single time.
struct Kernel {
  double alpha0, beta0, gamma0, delta0, epsilon0, kappa0;
};

/// Fundamental solutions mu0, mu1 of the characteristic equation
///   mu'' = eta mu' + 4 sigma mu
/// anchored at t_a (mu0(t_a)=0, mu0'(t_a)=2a(t_a), mu1(t_a)=1, mu1'(t_a)=0),
/// together with W = exp(int (c - 2d)) and the source quadratures that give
/// delta0, epsilon0, kappa0.
class CharacteristicBasis {
 public:
  static std::shared_ptr<const CharacteristicBasis> build(const CoeffSet& coeffs, Interval iv,
                                                          double anchor = 0.0,
                                                          const BasisOptions& opts = {});

  const Interval& interval() const { return iv_; }
  double anchor() const { return anchor_; }
  const CoeffEval& coeffs() const { return ce_; }
  /// True when f or g is not identically zero.
  bool has_source() const { return has_source_; }

  double mu0(double t) const { return dense_.eval(0, t); }
  double dmu0(double t) const { return dense_.eval(1, t); }
  double mu1(double t) const { return dense_.eval(2, t); }
  double dmu1(double t) const { return dense_.eval(3, t); }
  double W(double t) const;
  double eta(double t) const;
  double sigma(double t) const;
  double delta0(double t) const;
  double epsilon0(double t) const;
  double kappa0(double t) const;

  /// 2 a(t) W(t)^2, which equals 2a(t_a) mu1(t_a) exp(int_{t_a}^t eta) and
  /// is what mu0' mu1 - mu0 mu1' must reproduce.
  double wronskian_expected(double t) const;

  const DenseOutput& dense() const { return dense_; }
  const OdeStats& stats() const { return stats_; }

 private:
  CharacteristicBasis(const CoeffSet& cs, Interval iv, double anchor)
      : ce_(cs), iv_(iv), anchor_(anchor) {}
  CoeffEval ce_;
  Interval iv_;
  double anchor_;
  bool has_source_ = false;
  DenseOutput dense_;
  OdeStats stats_;
  double a_anchor_ = 0.0, d_anchor_ = 0.0, g_anchor_ = 0.0;
  friend Kernel kernel_at(const CharacteristicBasis&, double);
  friend class RiccatiState;
};

std::shared_ptr<const CharacteristicBasis> build_characteristic(const CoeffSet& coeffs,
                                                                Interval iv, double anchor = 0.0,
                                                                const BasisOptions& opts = {});

/// Raw kernel formulas. Throws SingularPointError when |mu0(t)| is below
/// 1e-12 max(1, |mu0'(t_a)|), in particular at the anchor itself.
Kernel kernel_at(const CharacteristicBasis& basis, double t);

/// Initial data of the Riccati system at time t0 (which is the anchor of the
/// characteristic basis used to propagate it).
struct RiccatiInit {
  double t0 = 0.0;
  double mu = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  /// Total kappa; for the modified system this is kappa1(t0) + kappa2(t0).
  double kappa = 0.0;
  std::optional<double> kappa2;

  void validate() const;
};

struct RiccatiValues {
  double mu, alpha, beta, gamma, delta, epsilon, kappa;
  // only meaningful for modified states
  double kappa1 = 0.0, kappa2 = 0.0;
};

/// Solution of the Riccati system for arbitrary initial data, obtained from
/// a characteristic basis through the multiparameter formulas.
class RiccatiState {
 public:
  RiccatiState(std::shared_ptr<const CharacteristicBasis> basis, RiccatiInit init);

  RiccatiValues at(double t) const;
  /// mu'(t), exact from the basis derivatives.
  double dmu(double t) const;

  /// Subinterval of the basis interval on which mu(t) != 0 (and, for the
  /// modified system, the kappa2 log argument is nonzero). Ends strictly
  /// inside a blow-up are reported through `blowup_lo`/`blowup_hi`.
  const Interval& valid_interval() const { return valid_; }
  std::optional<double> blowup_lo() const { return blow_lo_; }
  std::optional<double> blowup_hi() const { return blow_hi_; }

  bool is_modified() const { return modified_ != nullptr; }
  const Expr* h() const { return modified_ ? &modified_->h : nullptr; }
  const RiccatiInit& init() const { return init_; }
  const CoeffSet& coeffs() const { return basis_->coeffs().set(); }
  const CoeffEval& coeff_eval() const { return basis_->coeffs(); }
  const CharacteristicBasis& basis() const { return *basis_; }

  /// Attach kappa2(t) = -ln|int_{t0}^t h + exp(-kappa2(t0))| and
  /// kappa1 = kappa - kappa2.
  RiccatiState with_modified(const Expr& h, double kappa2_0) const;

 private:
  struct Modified {
    Expr h;
    double kappa2_0;
    DenseOutput integral;  // int_{t0}^t h
  };
  void check(double t) const;
  std::shared_ptr<const CharacteristicBasis> basis_;
  RiccatiInit init_;
  Interval valid_;
  std::optional<double> blow_lo_, blow_hi_;
  std::shared_ptr<const Modified> modified_;
  double p_ = 0.0;  // 2 alpha(t0) + d(t0)/a(t0)
};

RiccatiState propagate(std::shared_ptr<const CharacteristicBasis> basis, const RiccatiInit& init);

RiccatiState solve_modified(const RiccatiState& state, const Expr& h, double kappa2_0);

/// Build basis and state in one go; the basis anchor is init.t0.
RiccatiState solve_riccati(const CoeffSet& coeffs, Interval iv, const RiccatiInit& init,
                           const BasisOptions& opts = {});

/// Residuals LHS - RHS of every Riccati equation at the given times, with
/// derivatives from Richardson-extrapolated five-point differences of the
/// state evaluators. Equations: mu, alpha, beta, gamma, delta, epsilon, kappa,
/// plus kappa1 and kappa2 for modified states. `coeffs` may differ from the
/// state's own coefficients (used for sensitivity checks).
ResidualReport verify_riccati(const RiccatiState& state, const CoeffSet& coeffs,
                              std::span<const double> ts, double tol);
ResidualReport verify_riccati(const RiccatiState& state, std::span<const double> ts, double tol);

/// n evenly spaced points covering [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace exactrd
