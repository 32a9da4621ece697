#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tsh/execution.hpp"
#include "tsh/grid_function.hpp"

namespace tsh {

/// Status of a derivative value produced by the *_all routines.
enum class Quality {
  ok,
  junction,        // value computed, but the point is reported by admissibility_report
  outside_domain,  // not in T^kappa (resp. T_kappa); value is NaN
};

struct DerivedFunction {
  GridFunction values;
  std::vector<Quality> quality;
  /// Limits taken from inside the dense segment at segment endpoints, where
  /// the point value may jump (u^Δ at a right-scattered end, say). When set,
  /// Δ-integrals use these in the Simpson panels.
  std::optional<GridFunction> inner;
};

/// Delta-derivative at grid index i. Right-scattered points use the exact
/// difference quotient (u(sigma(t)) - u(t)) / mu(t); right-dense points use a
/// five-point stencil inside the dense segment (central when possible).
/// Throws DomainError when t_i is not in T^kappa.
std::vector<double> delta_derivative(const GridFunction& f, std::size_t i);
std::vector<double> delta_derivative(const GridFunction& f, double t);

/// Nabla-derivative at grid index i; mirror image on T_kappa.
std::vector<double> nabla_derivative(const GridFunction& f, std::size_t i);
std::vector<double> nabla_derivative(const GridFunction& f, double t);

DerivedFunction delta_derivative_all(const GridFunction& f, Execution exec = Execution::parallel);
DerivedFunction nabla_derivative_all(const GridFunction& f, Execution exec = Execution::parallel);

/// Derivative of the classical function underlying a dense segment at grid
/// index i. Stencil points flagged in `excluded` (other than i itself) are
/// not used; this lets callers differentiate compositions such as u∘sigma
/// that jump at segment ends.
std::vector<double> dense_derivative(const GridFunction& f, std::size_t i,
                                     const std::vector<bool>* excluded = nullptr);

/// Per-grid-point flag for the junction points of admissibility_report.
std::vector<bool> junction_mask(const TimeScale& ts);

/// Delta-antiderivative U(t) = ∫_a^t f Δτ with U(a) = 0 exactly.
struct Antiderivative {
  GridFunction values;
};
Antiderivative antiderivative(const GridFunction& f);
/// Same for an integrand that jumps at the ends of dense segments: gaps are
/// weighted with `point`, Simpson panels use `inner`.
Antiderivative antiderivative(const GridFunction& point, const GridFunction& inner);

/// True for the first and last grid points of a segment of positive length.
bool dense_endpoint(const Grid& g, std::size_t i);

/// Scalar integrand given per grid index. With inner = true it must return
/// the limit from inside the dense segment (only asked at dense endpoints).
/// Only values that carry Δ-weight are requested.
using IndexedIntegrand = std::function<double(std::size_t i, bool inner)>;
Antiderivative antiderivative(const TimeScale& ts, const IndexedIntegrand& f);
double delta_integral(const TimeScale& ts, const IndexedIntegrand& f);

/// Oriented Delta-integral over [c, d] between two grid points: exact
/// mu-weighted sums over gaps plus composite Simpson on dense samples.
std::vector<double> delta_integral(const GridFunction& f, double c, double d);
/// Integral over [a, b] of a scalar grid function.
double delta_integral(const GridFunction& f);

/// A quotient kept as numerator and denominator so that products of
/// reciprocal quotients cancel exactly.
struct Ratio {
  double num = 1.0;
  double den = 1.0;
  [[nodiscard]] double value() const { return num / den; }
};

/// rho^Delta(t) for t in T^kappa. nullopt where rho is not
/// Delta-differentiable (left-scattered, right-dense points).
std::optional<Ratio> rho_delta(const TimeScale& ts, double t);
/// sigma^nabla(t) for t in T_kappa. nullopt where sigma is not
/// nabla-differentiable (right-scattered, left-dense points).
std::optional<Ratio> sigma_nabla(const TimeScale& ts, double t);

/// |rho^Delta(t) sigma^nabla(t) - 1| on T^kappa_kappa. Throws StructuralError
/// at junction points and DomainError outside T^kappa_kappa.
double inverse_identity_residual(const TimeScale& ts, double t);

/// max_c |(u∘sigma)^nabla(t) - sigma^nabla(t) u^Delta(t)|.
double composition_identity_residual(const GridFunction& f, double t);
/// max_c |(u∘rho)^Delta(t) - rho^Delta(t) u^nabla(t)|.
double composition_identity_residual_dual(const GridFunction& f, double t);

/// |∫ <f, g^Δ> - ([<f,g>]_c^d - ∫ <f^Δ, g∘sigma>)| over [c, d].
double ibp_residual_i(const GridFunction& f, const GridFunction& g, double c, double d);
/// |∫ <f, g^Δ> - ([<f∘rho, g>]_c^d - ∫ rho^Δ <f^∇, g>)| over [c, d]. Throws
/// StructuralError if rho fails to be Delta-differentiable inside [c, d).
double ibp_residual_ii(const GridFunction& f, const GridFunction& g, double c, double d);

/// Composition with the jump operators, as grid functions.
GridFunction compose_sigma(const GridFunction& f);
GridFunction compose_rho(const GridFunction& f);

}  // namespace tsh
