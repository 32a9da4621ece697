#include "tsh/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tsh/calculus.hpp"
#include "tsh/format.hpp"

namespace tsh {

namespace {

struct State {
  Vec q, p;
};

struct Gradient {
  Vec hq, hp;
};

Gradient grad(const Hamiltonian& h, const Vec& q, const Vec& p) {
  Gradient g{Vec(q.size()), Vec(p.size())};
  h.gradient({q.data(), static_cast<std::size_t>(q.size())}, {p.data(), static_cast<std::size_t>(p.size())},
             {g.hq.data(), static_cast<std::size_t>(q.size())}, {g.hp.data(), static_cast<std::size_t>(p.size())});
  return g;
}

Vec vec_of(std::span<const double> s) {
  return Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size()));
}

// Graininess of grid point i, read off the grid so gaps are exact differences
// of stored structural points.
double grid_mu(const Grid& g, std::size_t i) {
  if (i + 1 >= g.size() || g.dense_interval(i)) return 0.0;
  return g.points[i + 1] - g.points[i];
}

std::size_t sigma_index(const Grid& g, std::size_t i) {
  return (i + 1 < g.size() && !g.dense_interval(i)) ? i + 1 : i;
}

struct ImplicitResult {
  Vec p;
  std::size_t iters = 0;
  double residual = 0.0;
};

// Solves p + m H_q(q, p) = rhs.
ImplicitResult solve_implicit(const Hamiltonian& h, const Vec& q, const Vec& rhs, double m,
                              const SolverConfig& cfg, double t) {
  ImplicitResult r{rhs, 0, 0.0};
  if (m == 0.0) return r;
  auto residual = [&](const Vec& p) { return Vec(p + m * grad(h, q, p).hq - rhs); };
  const auto d = q.size();
  Vec f = residual(r.p);
  auto jacobian = [&](const Vec& p) {
    return Eigen::FullPivLU<Mat>(Mat(Mat::Identity(d, d) + m * h.mixed_qp({q.data(), static_cast<std::size_t>(d)},
                                                                          {p.data(), static_cast<std::size_t>(d)})));
  };
  for (;;) {
    r.residual = f.cwiseAbs().maxCoeff();
    if (r.residual <= cfg.newton_tol) {
      // Quadratic convergence: one more step takes a just-converged iterate
      // from ~tol down to rounding level.
      if (r.residual > 0.0 && r.iters > 0) {
        const Eigen::FullPivLU<Mat> lu = jacobian(r.p);
        if (lu.isInvertible()) {
          const Vec p = r.p - lu.solve(f);
          const double res = residual(p).cwiseAbs().maxCoeff();
          if (res < r.residual) {
            r.p = p;
            r.residual = res;
          }
        }
      }
      return r;
    }
    if (r.iters >= cfg.newton_max_iter) break;
    Eigen::FullPivLU<Mat> lu = jacobian(r.p);
    if (!lu.isInvertible()) {
      // Damped fixed point p <- (1-w) p + w (rhs - m H_q).
      const std::size_t limit = r.iters + 20 * cfg.newton_max_iter;
      while (r.iters < limit) {
        r.p -= 0.5 * f;
        ++r.iters;
        f = residual(r.p);
        r.residual = f.cwiseAbs().maxCoeff();
        if (r.residual <= cfg.newton_tol) return r;
      }
      break;
    }
    r.p -= lu.solve(f);
    ++r.iters;
    f = residual(r.p);
  }
  throw ConvergenceError("implicit p-update did not converge at t = " + format_real(t) + " after " +
                         std::to_string(r.iters) + " iterations (residual " + format_real(r.residual) + ")");
}

State rk4(const Hamiltonian& h, const State& s, double dt) {
  auto rhs = [&](const Vec& q, const Vec& p) {
    const Gradient g = grad(h, q, p);
    return State{g.hp, -g.hq};
  };
  const State k1 = rhs(s.q, s.p);
  const State k2 = rhs(s.q + 0.5 * dt * k1.q, s.p + 0.5 * dt * k1.p);
  const State k3 = rhs(s.q + 0.5 * dt * k2.q, s.p + 0.5 * dt * k2.p);
  const State k4 = rhs(s.q + dt * k3.q, s.p + dt * k3.p);
  return {s.q + dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
          s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

void require_finite(const Vec& v, double t) {
  if (!v.allFinite()) throw ConvergenceError("trajectory became non-finite at t = " + format_real(t));
}

Trajectory empty_trajectory(const TimeScale& ts, std::size_t d) {
  const std::size_t n = ts.grid().size();
  Trajectory tr{PhasePath(GridFunction(ts, d), GridFunction(ts, d)),
                std::vector<StepKind>(n, StepKind::initial),
                std::vector<std::size_t>(n, 0),
                std::vector<double>(n, 0.0),
                {},
                {},
                ts.admissibility_report(),
                0};
  return tr;
}

void store(Trajectory& tr, std::size_t i, const Vec& q, const Vec& p) {
  for (std::size_t c = 0; c < tr.dim(); ++c) {
    tr.path.q(i, c) = q(static_cast<Eigen::Index>(c));
    tr.path.p(i, c) = p(static_cast<Eigen::Index>(c));
  }
}

void check_dims(const Hamiltonian& h, std::size_t a, std::size_t b, const char* what) {
  if (a != h.dim() || b != h.dim())
    throw std::invalid_argument(std::string(what) + ": initial data must have dimension " +
                                std::to_string(h.dim()));
}

}  // namespace

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::initial: return "initial";
    case StepKind::scattered: return "scattered";
    case StepKind::dense: return "dense";
    case StepKind::junction: return "junction";
  }
  return "?";
}

void Trajectory::write_csv(std::ostream& os) const {
  const std::size_t d = dim();
  os << "t,kind";
  for (std::size_t c = 1; c <= d; ++c) os << ",q" << c;
  for (std::size_t c = 1; c <= d; ++c) os << ",p" << c;
  os << ",newton_iters,residual\n";
  for (std::size_t i = 0; i < size(); ++i) {
    os << format_real(path.q.time(i)) << ',' << to_string(kind[i]);
    for (std::size_t c = 0; c < d; ++c) os << ',' << format_real(path.q(i, c));
    for (std::size_t c = 0; c < d; ++c) os << ',' << format_real(path.p(i, c));
    os << ',' << newton_iters[i] << ',' << format_real(residual[i]) << '\n';
  }
}

Trajectory solve_derivative_form(const Hamiltonian& h, const TimeScale& ts, std::span<const double> q0,
                                 std::span<const double> p0, const SolverConfig& cfg) {
  if (!(cfg.newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be > 0");
  check_dims(h, q0.size(), p0.size(), "solve_derivative_form");
  const std::size_t d = h.dim();
  const Grid& g = ts.grid();
  const std::vector<bool> junction = junction_mask(ts);
  Trajectory tr = empty_trajectory(ts, d);

  State s{vec_of(q0), vec_of(p0)};
  require_finite(s.q, g.points[0]);
  require_finite(s.p, g.points[0]);
  store(tr, 0, s.q, s.p);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double t1 = g.points[k + 1];
    if (g.dense_interval(k)) {
      s = rk4(h, s, t1 - g.points[k]);
      tr.kind[k + 1] = StepKind::dense;
    } else {
      const Vec q1 = s.q + grid_mu(g, k) * grad(h, s.q, s.p).hp;
      const ImplicitResult r = solve_implicit(h, q1, s.p, grid_mu(g, k + 1), cfg, t1);
      s = {q1, r.p};
      tr.kind[k + 1] = StepKind::scattered;
      tr.newton_iters[k + 1] = r.iters;
      tr.residual[k + 1] = r.residual;
    }
    if (junction[k + 1]) tr.kind[k + 1] = StepKind::junction;
    require_finite(s.q, t1);
    require_finite(s.p, t1);
    store(tr, k + 1, s.q, s.p);
  }

  // Constants of the equivalent integral form: q(a) = C_q and
  // p(a) = C_p - mu(a) H_q(q(a), p(a)).
  const Vec qa = vec_of(tr.path.q.at(0));
  const Vec pa = vec_of(tr.path.p.at(0));
  const Vec cp = pa + grid_mu(g, 0) * grad(h, qa, pa).hq;
  tr.c_q.assign(q0.begin(), q0.end());
  tr.c_p.assign(cp.data(), cp.data() + d);
  return tr;
}

Trajectory solve_integral_form(const Hamiltonian& h, const TimeScale& ts, std::span<const double> c_q,
                               std::span<const double> c_p, const SolverConfig& cfg) {
  check_dims(h, c_q.size(), c_p.size(), "solve_integral_form");
  const std::size_t d = h.dim();
  const Grid& g = ts.grid();
  const Vec cq = vec_of(c_q);
  const Vec cp = vec_of(c_p);

  // p(a) + mu(a) H_q(C_q, p(a)) = C_p fixes the matching initial state.
  const ImplicitResult start = solve_implicit(h, cq, cp, grid_mu(g, 0), cfg, g.points[0]);
  Trajectory tr = solve_derivative_form(h, ts, c_q, {start.p.data(), d}, cfg);
  tr.c_q.assign(c_q.begin(), c_q.end());
  tr.c_p.assign(c_p.begin(), c_p.end());

  const std::size_t n = g.size();
  GridFunction hq(ts, d), hp(ts, d);
  std::vector<double> qs(d), ps(d);
  double change = 0.0;
  for (std::size_t sweep = 1; sweep <= cfg.picard_max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) h.gradient(tr.path.q.at(i), tr.path.p.at(i), hq.at(i), hp.at(i));
    const GridFunction up = antiderivative(hp).values;
    const GridFunction uq = antiderivative(hq).values;
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s = sigma_index(g, i);
      for (std::size_t c = 0; c < d; ++c) {
        const double qn = c_q[c] + up(i, c);
        const double pn = c_p[c] - uq(s, c);
        change = std::max({change, std::abs(qn - tr.path.q(i, c)), std::abs(pn - tr.path.p(i, c))});
        tr.path.q(i, c) = qn;
        tr.path.p(i, c) = pn;
      }
    }
    if (!std::isfinite(change)) break;
    if (change <= cfg.newton_tol) {
      tr.picard_sweeps = sweep;
      std::fill(tr.newton_iters.begin(), tr.newton_iters.end(), 0);
      std::fill(tr.residual.begin(), tr.residual.end(), change);
      return tr;
    }
  }
  throw ConvergenceError("Picard iteration did not converge within " + std::to_string(cfg.picard_max_sweeps) +
                         " sweeps (last change " + format_real(change) + ")");
}

std::vector<Trajectory> solve_sweep(const Hamiltonian& h, const TimeScale& ts,
                                    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& initial,
                                    const SolverConfig& cfg, Execution exec) {
  std::vector<std::optional<Trajectory>> out(initial.size());
  std::vector<std::string> errors(initial.size());
  const auto n = static_cast<std::ptrdiff_t>(initial.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      out[i] = solve_derivative_form(h, ts, initial[i].first, initial[i].second, cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::vector<Trajectory> result;
  result.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!errors[i].empty()) throw ConvergenceError("trajectory " + std::to_string(i) + ": " + errors[i]);
    result.push_back(std::move(*out[i]));
  }
  return result;
}

StarResidual residual_star1(const Hamiltonian& h, const Trajectory& traj) {
  const TimeScale& ts = traj.scale();
  const Grid& g = ts.grid();
  const RestrictedDomains dom = ts.restricted_domains();
  const std::vector<bool> junction = junction_mask(ts);
  const std::size_t d = traj.dim();
  StarResidual out;
  std::vector<double> hq(d), hp(d);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.points[i];
    if (!dom.in_both(t)) continue;
    const auto rd = rho_delta(ts, t);
    if (junction[i] || !rd) {
      ++out.skipped;
      continue;
    }
    h.gradient(traj.path.q.at(i), traj.path.p.at(i), hq, hp);
    const std::vector<double> dq = delta_derivative(traj.path.q, i);
    std::vector<double> dp(d, 0.0);
    if (rd->num != 0.0) dp = nabla_derivative(traj.path.p, i);
    double r = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double lhs = rd->num != 0.0 ? rd->value() * dp[c] : 0.0;
      r = std::max({r, std::abs(dq[c] - hp[c]), std::abs(lhs + hq[c])});
    }
    if (r > out.value || std::isnan(r)) {
      out.value = r;
      out.worst_t = t;
    }
  }
  return out;
}

StarResidual residual_star2(const Hamiltonian& h, const Trajectory& traj) {
  const TimeScale& ts = traj.scale();
  const Grid& g = ts.grid();
  const RestrictedDomains dom = ts.restricted_domains();
  const std::size_t d = traj.dim();
  if (traj.c_q.size() != d || traj.c_p.size() != d)
    throw std::invalid_argument("residual_star2: trajectory carries no integral-form constants");
  GridFunction hq(ts, d), hp(ts, d);
  for (std::size_t i = 0; i < g.size(); ++i)
    h.gradient(traj.path.q.at(i), traj.path.p.at(i), hq.at(i), hp.at(i));
  const GridFunction up = antiderivative(hp).values;
  const GridFunction uq = antiderivative(hq).values;
  StarResidual out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!dom.in_upper(g.points[i])) continue;
    const std::size_t s = sigma_index(g, i);
    double r = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      r = std::max({r, std::abs(traj.path.q(s, c) - traj.c_q[c] - up(s, c)),
                    std::abs(traj.path.p(i, c) - traj.c_p[c] + uq(s, c))});
    }
    if (r > out.value || std::isnan(r)) {
      out.value = r;
      out.worst_t = g.points[i];
    }
  }
  return out;
}

std::vector<std::pair<double, double>> energy_series(const Hamiltonian& h, const Trajectory& traj) {
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    out.emplace_back(traj.path.q.time(i), h.value(traj.path.q.at(i), traj.path.p.at(i)));
  return out;
}

}  // namespace tsh
