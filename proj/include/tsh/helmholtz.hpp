#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsh/execution.hpp"
#include "tsh/field.hpp"
#include "tsh/quadrature.hpp"

namespace tsh {

enum class Verdict { hamiltonian, not_hamiltonian };

const char* to_string(Verdict v);

/// Axis-aligned box [lo, hi]^{2d} in phase space.
struct PhaseBox {
  double lo = -1.0;
  double hi = 1.0;
};

struct CheckOptions {
  PhaseBox box;
  std::size_t samples = 128;
  /// Defaults to 1e-8 for analytic Jacobians and 1e-5 for finite differences.
  std::optional<double> tol;
  std::uint64_t seed = 0;
  bool finite_difference = false;
  Execution exec = Execution::parallel;
};

struct HelmholtzReport {
  Verdict verdict = Verdict::hamiltonian;
  double trace_violation = 0.0;  // max |∂X_q/∂q + (∂X_p/∂p)ᵀ| entrywise
  double asym_qp = 0.0;          // max |B - Bᵀ|, B = ∂X_q/∂p
  double asym_pq = 0.0;          // max |C - Cᵀ|, C = ∂X_p/∂q
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::size_t failed_samples = 0;
  bool analytic_jacobians = true;
  std::string sample_description;
  std::string worst_condition;  // trace, asym_qp or asym_pq
  std::vector<double> worst_q;
  std::vector<double> worst_p;
};

/// The four Jacobian blocks at (q, p): exact when the field is expression
/// backed and `finite_difference` is false, central differences otherwise.
JacobianBlocks jacobian_blocks(const VectorField& x, const Vec& q, const Vec& p,
                               bool finite_difference = false);

/// Phase-space sample points used by the checks: shifted Sobol points in
/// the box, as (q, p) concatenated.
std::vector<std::vector<double>> phase_samples(std::size_t dim, const PhaseBox& box,
                                               std::size_t count, std::uint64_t seed);

/// Evaluates the Helmholtz conditions at the sample points. Samples where
/// the field cannot be evaluated are skipped and counted; more than 10%
/// failures throws.
HelmholtzReport check_conditions(const VectorField& x, const CheckOptions& options = {});

class NotHamiltonianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H(q, p) = ∫_0^1 [p·X_q(λq, λp) - q·X_p(λq, λp)] dλ by Gauss-Legendre.
class ReconstructedHamiltonian {
 public:
  ReconstructedHamiltonian(VectorField source, std::size_t nodes);

  [[nodiscard]] double operator()(std::span<const double> q, std::span<const double> p) const;
  /// Gradient by differentiating under the λ-integral with the same rule.
  void gradient(std::span<const double> q, std::span<const double> p, std::span<double> hq,
                std::span<double> hp) const;

  [[nodiscard]] const VectorField& source() const { return source_; }
  [[nodiscard]] std::size_t nodes() const { return rule_.nodes.size(); }
  [[nodiscard]] Hamiltonian as_hamiltonian() const;

 private:
  VectorField source_;
  QuadratureRule rule_;
};

struct ReconstructOptions {
  std::size_t nodes = 32;
  /// Run check_conditions first and refuse non-Hamiltonian fields.
  bool require_hamiltonian = true;
  CheckOptions check;
};

/// Builds the reconstruction after validating that X is finite on the rays
/// {λz : λ ∈ [0,1]} through the check samples. Throws NotHamiltonianError
/// (when required) or DomainError.
ReconstructedHamiltonian reconstruct(const VectorField& x, const ReconstructOptions& options = {});

struct RoundtripResult {
  double residual = 0.0;  // max ‖∇_p H - X_q‖∞ + ‖∇_q H + X_p‖∞
  std::vector<double> worst_q;
  std::vector<double> worst_p;
};

RoundtripResult roundtrip_residual(const VectorField& x, const ReconstructedHamiltonian& h,
                                   const PhaseBox& box, std::size_t samples, std::uint64_t seed,
                                   Execution exec = Execution::parallel);

}  // namespace tsh
