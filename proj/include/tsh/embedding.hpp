#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsh/grid_function.hpp"

namespace tsh {

/// Right-hand side f(t, x) of x' = f(t, x); writes dim values into `out`.
using RhsFunction = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

/// x^Δ(t) = f(t, x(t)) on a time scale.
class DynamicEquation {
 public:
  DynamicEquation(RhsFunction f, std::size_t dim, TimeScale ts);

  /// Forward solve: x(σ t) = x(t) + μ(t) f(t, x(t)) across gaps, RK4 at the
  /// grid step on dense segments.
  [[nodiscard]] GridFunction solve(std::span<const double> x0) const;

  [[nodiscard]] const TimeScale& scale() const { return ts_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }

 private:
  RhsFunction f_;
  std::size_t dim_;
  TimeScale ts_;
};

DynamicEquation embed_ode(RhsFunction f, std::size_t dim, const TimeScale& ts);

/// x(t) = x(a) + ∫_a^{σ(t)} f(s, x(s)) Δs on a time scale.
class IntegralEquation {
 public:
  IntegralEquation(RhsFunction f, std::size_t dim, TimeScale ts);

  /// Right-hand side evaluated along a given x (uses x(a) as the constant).
  [[nodiscard]] GridFunction apply(const GridFunction& x) const;
  /// Picard iteration from the constant function x(a).
  [[nodiscard]] GridFunction solve(std::span<const double> xa, double tol = 1e-12,
                                   std::size_t max_sweeps = 200) const;

  [[nodiscard]] const TimeScale& scale() const { return ts_; }

 private:
  RhsFunction f_;
  std::size_t dim_;
  TimeScale ts_;
};

IntegralEquation embed_integral_equation(RhsFunction f, std::size_t dim, const TimeScale& ts);

/// Lagrangian L(t, x, v).
using Lagrangian = std::function<double(double t, std::span<const double> x, std::span<const double> v)>;

/// ℒ_Δ(x) = ∫_a^{σ(t)} L(s, x(s), x^Δ(s)) Δs.
class DeltaFunctional {
 public:
  explicit DeltaFunctional(Lagrangian l);

  /// Whole-scale value, t = ρ(b) so that σ(t) = b.
  [[nodiscard]] double operator()(const GridFunction& x) const;
  /// Running value at every grid point t (NaN outside T^κ).
  [[nodiscard]] GridFunction running(const GridFunction& x) const;

 private:
  Lagrangian l_;
};

DeltaFunctional embed_functional(Lagrangian l);

}  // namespace tsh
