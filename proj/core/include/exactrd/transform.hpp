#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exactrd/classical.hpp"
#include "exactrd/coeffs.hpp"
#include "exactrd/pde.hpp"
#include "exactrd/riccati.hpp"

namespace exactrd {

/// Which construction a generalized system comes from. Exponential is the
/// modified-system (kappa1/kappa2) linear family; the others mirror the
/// classical families.
enum class GeneralizedKind { LinearRD, Exponential, DLV2, DLV3, GrayScott, Burgers };

std::string_view kind_name(GeneralizedKind k);

struct SimilarityMap {
  double prefactor;  // mu^{-1/2} e^{alpha x^2 + delta x + kappa}, or beta for reduced states
  double xi;         // beta x + epsilon
  double tau;        // gamma
};

/// Throws DomainError when mu(t) <= 0.
SimilarityMap similarity_map(const RiccatiState& state, double x, double t, bool reduced = false);

/// Variable-coefficient system whose interaction coefficients are derived
/// from a Riccati state. For every component k the right-hand side is
///   a f_xx - (b x^2 - d - L_k - x f) f - (g - c x) f_x + coupling_k
/// (Burgers: a f_xx - b_k a f f_x - c_k a (psi phi)_x + c (f + x f_x) - g f_x).
class GeneralizedSystem : public PdeSystem {
 public:
  GeneralizedSystem(GeneralizedKind kind, RiccatiState state, ConstantCoeffs k, int arity,
                    std::optional<Expr> h = std::nullopt);

  int arity() const override { return arity_; }
  std::vector<std::string> equation_names() const override;
  void rhs(double t, std::span<const double> xs, std::span<const Jet> jets,
           std::span<double> out) const override;

  GeneralizedKind kind() const { return kind_; }
  const CoeffSet& base_coeffs() const { return base_.set(); }
  const RiccatiState& state() const { return state_; }
  const ConstantCoeffs& constants() const { return k_; }

  /// Names of the derived coefficients, e.g. h, L1, L2, h1, r1, M1.
  std::vector<std::string> coefficient_names() const;
  /// Value of a derived coefficient; time-only coefficients ignore x.
  double coefficient(std::string_view name, double x, double t) const;

  /// Same derived coefficients, different base coefficients a..g (used to
  /// show that the residual check is sensitive to them).
  GeneralizedSystem with_base_coeffs(const CoeffSet& cs) const;

 private:
  struct TimeData {
    CoeffValues cv;
    RiccatiValues st;
    double ab2 = 0.0;   // a beta^2
    double hval = 0.0;  // h(t) for the exponential family
  };
  TimeData time_data(double t) const;
  double S(const TimeData& d, double x) const { return (d.st.alpha * x + d.st.delta) * x + d.st.kappa; }

  GeneralizedKind kind_;
  RiccatiState state_;
  CoeffEval base_;
  ConstantCoeffs k_;
  int arity_;
  std::optional<Expr> h_;
};

/// Transformed fields bound to the system they solve.
class GeneralizedSolution {
 public:
  GeneralizedSolution(std::shared_ptr<const GeneralizedSystem> system, FieldSet fields,
                      std::optional<ClassicalSolution> classical, double y = 0.0)
      : system_(std::move(system)), fields_(std::move(fields)), classical_(std::move(classical)), y_(y) {}

  const GeneralizedSystem& system() const { return *system_; }
  std::shared_ptr<const GeneralizedSystem> system_ptr() const { return system_; }
  const FieldSet& fields() const { return fields_; }
  int arity() const { return fields_.arity; }
  void eval(double x, double t, std::span<double> out) const { fields_.eval(x, t, out); }
  const RiccatiState& state() const { return system_->state(); }
  const std::optional<ClassicalSolution>& classical() const { return classical_; }
  double y() const { return y_; }

 private:
  std::shared_ptr<const GeneralizedSystem> system_;
  FieldSet fields_;
  std::optional<ClassicalSolution> classical_;
  double y_;
};

/// Linear reaction-diffusion construction; requires a1 = 1 and an
/// unmodified state.
GeneralizedSolution build_linear_rd(const RiccatiState& state, const ClassicalSolution& classical);

/// Exponential-type solutions; the state must carry kappa1/kappa2.
GeneralizedSolution build_exponential(const RiccatiState& state, double y = 0.0);

GeneralizedSolution build_dlv2(const RiccatiState& state, const ClassicalSolution& classical);
GeneralizedSolution build_dlv3(const RiccatiState& state, const ClassicalSolution& classical);
GeneralizedSolution build_gray_scott(const RiccatiState& state, const ClassicalSolution& classical);

/// Burgers construction on a reduced state. The reduced equations
/// beta' = c beta, gamma' = a beta^2, epsilon' = -g beta are checked
/// numerically at tolerance `tol` on 200 nodes of the valid interval.
GeneralizedSolution build_burgers(const RiccatiState& state, const ClassicalSolution& classical,
                                  double tol = 1e-7);

/// Dispatch on the classical family.
GeneralizedSolution build_generalized(const RiccatiState& state, const ClassicalSolution& classical);

/// The identity state: a = 1, all other coefficients zero, mu = beta = 1,
/// so that xi = x, tau = t and the prefactor is 1.
RiccatiState identity_state(Interval iv);

}  // namespace exactrd
