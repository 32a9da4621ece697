#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tsh/execution.hpp"
#include "tsh/field.hpp"
#include "tsh/variational.hpp"

namespace tsh {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double newton_tol = 1e-12;
  std::size_t newton_max_iter = 50;
  std::size_t picard_max_sweeps = 200;
};

/// How a trajectory point was reached from its predecessor.
enum class StepKind { initial, scattered, dense, junction };

const char* to_string(StepKind k);

struct Trajectory {
  PhasePath path;
  std::vector<StepKind> kind;
  std::vector<std::size_t> newton_iters;
  std::vector<double> residual;  // final Newton residual (or last sweep change)
  std::vector<double> c_q;       // constants of the integral form
  std::vector<double> c_p;
  std::vector<double> junctions;  // admissibility_report of the scale
  std::size_t picard_sweeps = 0;

  [[nodiscard]] const TimeScale& scale() const { return path.scale(); }
  [[nodiscard]] std::size_t dim() const { return path.dim(); }
  [[nodiscard]] std::size_t size() const { return path.q.size(); }

  /// Header `t,kind,q1..qd,p1..pd,newton_iters,residual`; shortest round-trip reals.
  void write_csv(std::ostream& os) const;
};

/// Derivative form: at a gap t_k -> t_{k+1}
///   q_{k+1} = q_k + mu(t_k) H_p(q_k, p_k)
///   p_{k+1} = p_k - mu(t_{k+1}) H_q(q_{k+1}, p_{k+1})   (Newton in p_{k+1}),
/// which is rho^Δ p^∇ = -H_q at t_{k+1}. mu(t_{k+1}) = 0 when t_{k+1} starts a
/// dense segment or is a left-scattered b, so p is carried there. Dense
/// segments use classical RK4 on Hamilton's equations at the grid step.
Trajectory solve_derivative_form(const Hamiltonian& h, const TimeScale& ts, std::span<const double> q0,
                                 std::span<const double> p0, const SolverConfig& cfg = {});

/// Integral form with constants (C_q, C_p):
///   q(sigma(t)) = C_q + ∫_a^{sigma(t)} H_p Δτ,  p(t) = C_p - ∫_a^{sigma(t)} H_q Δτ,
/// with q(a) = C_q. Picard sweeps on the grid, started from the
/// derivative-form solution with matching constants.
Trajectory solve_integral_form(const Hamiltonian& h, const TimeScale& ts, std::span<const double> c_q,
                               std::span<const double> c_p, const SolverConfig& cfg = {});

/// Independent trajectories from several initial states.
std::vector<Trajectory> solve_sweep(const Hamiltonian& h, const TimeScale& ts,
                                    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& initial,
                                    const SolverConfig& cfg = {}, Execution exec = Execution::parallel);

struct StarResidual {
  double value = 0.0;
  double worst_t = 0.0;
  std::size_t skipped = 0;  // junction points, where no equation is enforced
};

/// Max pointwise residual of the derivative form over T^κ_κ.
StarResidual residual_star1(const Hamiltonian& h, const Trajectory& traj);
/// Max pointwise residual of the integral form over T^κ, using traj.c_q/c_p.
StarResidual residual_star2(const Hamiltonian& h, const Trajectory& traj);

std::vector<std::pair<double, double>> energy_series(const Hamiltonian& h, const Trajectory& traj);

}  // namespace tsh
