#pragma once

#include <cstddef>
#include <cstdint>

#include "tsh/calculus.hpp"
#include "tsh/execution.hpp"
#include "tsh/field.hpp"
#include "tsh/grid_function.hpp"

namespace tsh {

/// (q, p) on a shared grid, both of dimension d.
struct PhasePath {
  GridFunction q;
  GridFunction p;

  PhasePath(GridFunction q_, GridFunction p_);
  [[nodiscard]] std::size_t dim() const { return q.dim(); }
  [[nodiscard]] const TimeScale& scale() const { return q.scale(); }
};

/// Boundary-vanishing variation (u, v): u(a) = u(b) = v(a) = v(b) = 0 exactly.
struct Variation {
  GridFunction u;
  GridFunction v;

  Variation(GridFunction u_, GridFunction v_);
  [[nodiscard]] std::size_t dim() const { return u.dim(); }
  /// (u, v) stacked into one 2d-dimensional grid function.
  [[nodiscard]] GridFunction stacked() const;
};

/// Seeded random variation: each component is
/// (t-a)(b-t) * sum_{k<5} c_k s^k with s = (t-a)/(b-a), c_k ~ U(-1, 1).
/// `stream` selects an independent generator for the same seed.
Variation random_variation(const TimeScale& ts, std::size_t dim, std::uint64_t seed,
                           std::uint64_t stream = 0);

/// ∫_a^b <f(t), g(t)> Δt.
double l2_delta(const GridFunction& f, const GridFunction& g);
/// <f, J g>_{L²,Δ} for 2d-dimensional f, g with J = [[0, I], [-I, 0]].
double l2_delta_symplectic(const GridFunction& f, const GridFunction& g);
/// sqrt(l2_delta(f, f)).
double l2_delta_norm(const GridFunction& f);

/// ∫_a^b [<p, q^Δ> - H(q, p)] Δt.
double action_functional(const Hamiltonian& h, const PhasePath& path);

/// ∫_a^b [<p, u^Δ> + <v, q^Δ> - <H_q, u> - <H_p, v>] Δt.
double frechet_action(const Hamiltonian& h, const PhasePath& path, const Variation& var);

/// DO_X(q,p)(u,v) = (u^Δ - A u - B v ; ρ^Δ v^∇ - C u - D v) on T^κ_κ, with
/// A = ∂X_q/∂q, B = ∂X_q/∂p, C = ∂X_p/∂q, D = ∂X_p/∂p along the path.
/// Points outside T^κ_κ are NaN/outside_domain; junctions are flagged, and are
/// NaN where ρ is not Δ-differentiable.
DerivedFunction apply_DOX(const VectorField& x, const PhasePath& path, const Variation& var);

/// Adjoint w.r.t. the L²-Δ symplectic product:
/// (u^Δ + Dᵀu - Bᵀv ; ρ^Δ v^∇ - Cᵀu + Aᵀv).
DerivedFunction apply_adjoint_DOX(const VectorField& x, const PhasePath& path, const Variation& var);

/// <F, J g>_{L²,Δ} for an operator output F and a variation g. Points outside
/// T^κ_κ carry no weight (g vanishes there or they have zero measure).
/// Throws StructuralError if F is undefined at a weighted point.
double pair_symplectic(const DerivedFunction& f, const Variation& g);

struct SelfAdjointness {
  double residual = 0.0;       // max normalised |<DO f, g>_J - <DO g, f>_J|
  std::size_t worst_trial = 0;
};

/// Max over `trials` random variation pairs of
/// |<DO f, g>_J - <DO g, f>_J| / (|f| |g|). Near zero iff DO is self-adjoint.
SelfAdjointness selfadjointness_residual(const VectorField& x, const PhasePath& path,
                                         std::size_t trials, std::uint64_t seed,
                                         Execution exec = Execution::parallel);

/// Same statistic for <DO f, g>_J - <DO* g, f>_J; small for every field.
SelfAdjointness adjoint_consistency_residual(const VectorField& x, const PhasePath& path,
                                             std::size_t trials, std::uint64_t seed,
                                             Execution exec = Execution::parallel);

/// A smooth reference path for operator tests: q_i(t) = r sin(t + i),
/// p_i(t) = r cos(t + i).
PhasePath reference_path(const TimeScale& ts, std::size_t dim, double radius = 0.5);

}  // namespace tsh
