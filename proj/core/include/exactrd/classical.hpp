#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exactrd/pde.hpp"
#include "exactrd/report.hpp"
#include "exactrd/verify.hpp"

namespace exactrd {

enum class Family { LinearRD, DLV2, DLV3, GrayScott, Burgers };

/// "linear_rd", "dlv2", "dlv3", "gray_scott", "burgers"
std::string_view family_name(Family f);
/// Inverse of family_name; throws PreconditionError on unknown names.
Family family_from_name(std::string_view name);

/// Coefficients of the constant-coefficient systems, in a layout shared by
/// all families. Unused entries stay zero.
///   linear_rd   u_t = a1 u_xx - b1 u + v,           v_t = a1 v_xx - b2 v
///   dlv2, dlv3  u_i,t = u_i,xx + u_i (a_i - b_i u - c_i v - e_i w)
///   gray_scott  u_t = u_xx - u v^2 + b1 (1 - u),    v_t = v_xx + u v^2 - b1 v + b2
///   burgers     u_t = u_xx - b1 u u_x - c1 (u v)_x, v_t = v_xx - b2 v v_x - c2 (u v)_x
struct ConstantCoeffs {
  double a[3] = {0, 0, 0};
  double b[3] = {0, 0, 0};
  double c[3] = {0, 0, 0};
  double e[3] = {0, 0, 0};
};

/// Constant-coefficient system of a family as a PdeSystem in (xi, tau).
class ConstantSystem : public PdeSystem {
 public:
  ConstantSystem(Family family, int arity, ConstantCoeffs k) : family_(family), arity_(arity), k_(k) {}
  int arity() const override { return arity_; }
  std::vector<std::string> equation_names() const override;
  void rhs(double t, std::span<const double> xs, std::span<const Jet> jets,
           std::span<double> out) const override;

  Family family() const { return family_; }
  const ConstantCoeffs& coeffs() const { return k_; }

  /// Reaction/advection part only: RHS minus the diffusion term
  /// (a1 f_xx for linear_rd, f_xx otherwise).
  void reaction(std::span<const Jet> node, std::span<double> out) const;
  double diffusivity() const { return family_ == Family::LinearRD ? k_.a[0] : 1.0; }

 private:
  Family family_;
  int arity_;
  ConstantCoeffs k_;
};

enum class Dlv2Branch { NuZero, NuRatio };

enum class AsymptoticRegime { Exclusion, Coexistence, Unknown };
std::string_view regime_name(AsymptoticRegime r);

/// Large-time behaviour of a dlv2 solution as classified from the parameter
/// ratios A^ = a1/a2, B^ = b1/b2, C^ = c1/c2.
struct AsymptoticState {
  AsymptoticRegime regime = AsymptoticRegime::Unknown;
  double u = 0.0, v = 0.0;  // limit state when regime != Unknown
  double A_hat = 0.0, B_hat = 0.0, C_hat = 0.0;
};

enum class BurgersMode {
  /// The literature closed form with A and the amplitude factor K taken as
  /// given. Only a solution on a restricted parameter family.
  Printed,
  /// The exact tanh wave u = B + q T, v = r + s T with T = tanh(20 A xi -
  /// 10 A - omega tau), all of q, r, s, omega derived from b_i, c_i.
  Exact,
};

struct BurgersOptions {
  BurgersMode mode = BurgersMode::Printed;
  double B = 1.0;
  /// Overrides of A = 4 c1 c2 - 1/(4 c1) - 2 and K = 2 c1 - 1/(4 c1 c2) - 1.
  std::optional<double> A;
  std::optional<double> K;
};

/// Closed-form solution of one of the constant-coefficient systems.
class ClassicalSolution {
 public:
  Family family() const { return family_; }
  int arity() const { return system_->arity(); }
  /// Named parameters (family inputs and derived constants), sorted by name.
  const std::map<std::string, double>& params() const { return params_; }
  double param(const std::string& name) const;
  const ConstantSystem& system() const { return *system_; }
  std::shared_ptr<const ConstantSystem> system_ptr() const { return system_; }

  /// u, v[, w] at (xi, tau).
  void eval(double xi, double tau, std::span<double> out) const;
  FieldSet fields() const;

  /// Grid on which the family's residual is certified.
  const Grid& standard_grid() const { return grid_; }

  /// Only dlv2 solutions carry a classification.
  const std::optional<AsymptoticState>& asymptotic() const { return asym_; }

  /// Same solution with `delta` added to the first component (negative
  /// control for the residual checks).
  ClassicalSolution perturbed(double delta) const;

 private:
  friend ClassicalSolution linear_rd(double, double, double);
  friend ClassicalSolution dlv2(double, double, double, double, double, double, Dlv2Branch);
  friend ClassicalSolution dlv3(double, double);
  friend ClassicalSolution gray_scott(double, double);
  friend ClassicalSolution burgers(double, double, double, double, const BurgersOptions&);

  Family family_ = Family::LinearRD;
  std::map<std::string, double> params_;
  std::shared_ptr<const ConstantSystem> system_;
  std::shared_ptr<const std::function<void(double, double, std::span<double>)>> fn_;
  Grid grid_;
  std::optional<AsymptoticState> asym_;
};

ClassicalSolution linear_rd(double a1, double b1, double b2);

/// Two-component Lotka-Volterra traveling wave
///   u = (A/4B)(1 - tanh(sqrt(A/24) xi - 5 A tau / 12))^2,  v = nu0 + nu1 u.
/// NuZero requires a1 = a2, c1 != c2, b1 != b2; NuRatio sets nu0 = a2/c2.
ClassicalSolution dlv2(double a1, double a2, double b1, double b2, double c1, double c2,
                       Dlv2Branch branch);

/// Three-component traveling wave with front speed theta; requires
/// theta + 2 < a1 < 4 (theta + 2). The remaining system constants are derived.
ClassicalSolution dlv3(double a1, double theta);

/// Gray-Scott front, 0 < b1 <= 1/4 and b2 = 0.
ClassicalSolution gray_scott(double b1, double b2 = 0.0);

ClassicalSolution burgers(double b1, double b2, double c1, double c2,
                          const BurgersOptions& opts = {});

/// Residual of the solution in its own constant-coefficient system.
ResidualReport residual_constant_system(const ClassicalSolution& sol, const Grid& grid,
                                        double tol = 1e-6, int threads = 1);
ResidualReport residual_constant_system(const ClassicalSolution& sol, double tol = 1e-6);

}  // namespace exactrd
