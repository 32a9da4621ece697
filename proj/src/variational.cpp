#include "tsh/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace tsh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec vec_of(std::span<const double> s) {
  return Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size()));
}

enum class Form { direct, adjoint };

DerivedFunction apply_operator(const VectorField& x, const PhasePath& path, const Variation& var,
                               Form form) {
  if (x.dim() != path.dim() || var.dim() != path.dim())
    throw std::invalid_argument("apply_DOX: field, path and variation dimensions differ");
  path.q.require_compatible(var.u, "apply_DOX");
  const TimeScale& ts = path.scale();
  const Grid& g = ts.grid();
  const std::size_t d = path.dim();
  const RestrictedDomains dom = ts.restricted_domains();
  const std::vector<bool> junction = junction_mask(ts);

  DerivedFunction out{GridFunction(ts, 2 * d), std::vector<Quality>(g.size(), Quality::ok), GridFunction(ts, 2 * d)};
  auto combine = [&](std::size_t i, const Vec& du, const Vec& rv, std::span<double> dst) {
    const Vec u = vec_of(var.u.at(i));
    const Vec v = vec_of(var.v.at(i));
    const JacobianBlocks j = x.jacobian(vec_of(path.q.at(i)), vec_of(path.p.at(i)));
    Vec top, bottom;
    if (form == Form::direct) {
      top = du - j.qq * u - j.qp * v;
      bottom = rv - j.pq * u - j.pp * v;
    } else {
      top = du + j.pp.transpose() * u - j.qp.transpose() * v;
      bottom = rv - j.pq.transpose() * u + j.qq.transpose() * v;
    }
    for (std::size_t c = 0; c < d; ++c) {
      dst[c] = top(static_cast<Eigen::Index>(c));
      dst[d + c] = bottom(static_cast<Eigen::Index>(c));
    }
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    // Inside a dense segment rho^Delta = 1 and both derivatives are classical.
    if (dense_endpoint(g, i))
      combine(i, vec_of(dense_derivative(var.u, i)), vec_of(dense_derivative(var.v, i)), out.inner->at(i));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.points[i];
    auto dst = out.values.at(i);
    if (!dom.in_both(t)) {
      std::fill(dst.begin(), dst.end(), kNaN);
      out.quality[i] = Quality::outside_domain;
      continue;
    }
    if (junction[i]) out.quality[i] = Quality::junction;
    const auto rd = rho_delta(ts, t);
    if (!rd) {
      std::fill(dst.begin(), dst.end(), kNaN);
      continue;
    }
    const Vec du = vec_of(delta_derivative(var.u, i));
    Vec rv = Vec::Zero(static_cast<Eigen::Index>(d));
    if (rd->num != 0.0) rv = rd->value() * vec_of(nabla_derivative(var.v, i));
    combine(i, du, rv, dst);
  }
  return out;
}

SelfAdjointness trial_statistic(const VectorField& x, const PhasePath& path, std::size_t trials,
                                std::uint64_t seed, Execution exec, Form second) {
  if (trials == 0) throw std::invalid_argument("selfadjointness_residual: trials must be >= 1");
  const TimeScale& ts = path.scale();
  for (double t : ts.admissibility_report()) {
    if (!rho_delta(ts, t))
      throw StructuralError("time scale is not admissible: rho is not Delta-differentiable at t = " +
                            std::to_string(t));
  }
  std::vector<double> residual(trials, 0.0);
  std::vector<std::string> errors(trials);
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto trial = static_cast<std::uint64_t>(k);
    try {
      const Variation f = random_variation(ts, path.dim(), seed, 2 * trial);
      const Variation g = random_variation(ts, path.dim(), seed, 2 * trial + 1);
      const double lhs = pair_symplectic(apply_operator(x, path, f, Form::direct), g);
      const double rhs = pair_symplectic(apply_operator(x, path, g, second), f);
      const double norm = l2_delta_norm(f.stacked()) * l2_delta_norm(g.stacked());
      residual[static_cast<std::size_t>(k)] = std::abs(lhs - rhs) / norm;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  SelfAdjointness out;
  for (std::size_t k = 0; k < trials; ++k) {
    if (!errors[k].empty()) throw StructuralError(errors[k]);
    if (residual[k] > out.residual) {
      out.residual = residual[k];
      out.worst_trial = k;
    }
  }
  return out;
}

}  // namespace

PhasePath::PhasePath(GridFunction q_, GridFunction p_) : q(std::move(q_)), p(std::move(p_)) {
  q.require_compatible(p, "PhasePath");
}

Variation::Variation(GridFunction u_, GridFunction v_) : u(std::move(u_)), v(std::move(v_)) {
  u.require_compatible(v, "Variation");
  const std::size_t last = u.size() - 1;
  for (std::size_t c = 0; c < u.dim(); ++c) {
    if (u(0, c) != 0.0 || u(last, c) != 0.0 || v(0, c) != 0.0 || v(last, c) != 0.0)
      throw std::invalid_argument("Variation must vanish exactly at a and b");
  }
}

GridFunction Variation::stacked() const {
  const std::size_t d = dim();
  GridFunction out(u.scale(), 2 * d);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t c = 0; c < d; ++c) {
      out(i, c) = u(i, c);
      out(i, d + c) = v(i, c);
    }
  return out;
}

Variation random_variation(const TimeScale& ts, std::size_t dim, std::uint64_t seed,
                           std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 gen(seq);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double a = ts.min();
  const double b = ts.max();
  auto make = [&] {
    std::vector<double> c(5 * dim);
    for (double& x : c) x = coef(gen);
    return GridFunction::sample(ts, dim, [&](double t, std::span<double> out) {
      const double s = (t - a) / (b - a);
      const double bump = (t - a) * (b - t);
      for (std::size_t k = 0; k < dim; ++k) {
        double poly = 0.0;
        for (std::size_t m = 5; m-- > 0;) poly = poly * s + c[5 * k + m];
        out[k] = bump * poly;
      }
    });
  };
  GridFunction u = make();
  GridFunction v = make();
  return {std::move(u), std::move(v)};
}

double l2_delta(const GridFunction& f, const GridFunction& g) {
  f.require_compatible(g, "l2_delta");
  return delta_integral(pointwise_dot(f, g));
}

double l2_delta_symplectic(const GridFunction& f, const GridFunction& g) {
  f.require_compatible(g, "l2_delta_symplectic");
  if (f.dim() % 2 != 0)
    throw std::invalid_argument("l2_delta_symplectic: dimension must be even, got " +
                                std::to_string(f.dim()));
  const std::size_t d = f.dim() / 2;
  GridFunction w(f.scale(), 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += f(i, c) * g(i, d + c) - f(i, d + c) * g(i, c);
    w(i, 0) = s;
  }
  return delta_integral(w);
}

double l2_delta_norm(const GridFunction& f) { return std::sqrt(l2_delta(f, f)); }

double action_functional(const Hamiltonian& h, const PhasePath& path) {
  if (h.dim() != path.dim()) throw std::invalid_argument("action_functional: dimension mismatch");
  return delta_integral(path.scale(), [&](std::size_t i, bool inner) {
    const std::vector<double> dq = inner ? dense_derivative(path.q, i) : delta_derivative(path.q, i);
    double s = 0.0;
    for (std::size_t c = 0; c < path.dim(); ++c) s += path.p(i, c) * dq[c];
    return s - h.value(path.q.at(i), path.p.at(i));
  });
}

double frechet_action(const Hamiltonian& h, const PhasePath& path, const Variation& var) {
  if (h.dim() != path.dim() || var.dim() != path.dim())
    throw std::invalid_argument("frechet_action: dimension mismatch");
  path.q.require_compatible(var.u, "frechet_action");
  const std::size_t d = path.dim();
  std::vector<double> hq(d), hp(d);
  return delta_integral(path.scale(), [&](std::size_t i, bool inner) {
    const std::vector<double> du = inner ? dense_derivative(var.u, i) : delta_derivative(var.u, i);
    const std::vector<double> dq = inner ? dense_derivative(path.q, i) : delta_derivative(path.q, i);
    h.gradient(path.q.at(i), path.p.at(i), hq, hp);
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c)
      s += path.p(i, c) * du[c] + var.v(i, c) * dq[c] - hq[c] * var.u(i, c) - hp[c] * var.v(i, c);
    return s;
  });
}

DerivedFunction apply_DOX(const VectorField& x, const PhasePath& path, const Variation& var) {
  return apply_operator(x, path, var, Form::direct);
}

DerivedFunction apply_adjoint_DOX(const VectorField& x, const PhasePath& path, const Variation& var) {
  return apply_operator(x, path, var, Form::adjoint);
}

double pair_symplectic(const DerivedFunction& f, const Variation& g) {
  const std::size_t d = g.dim();
  if (f.values.dim() != 2 * d) throw std::invalid_argument("pair_symplectic: dimension mismatch");
  const TimeScale& ts = f.values.scale();
  return delta_integral(ts, [&](std::size_t i, bool inner) {
    const GridFunction& vals = inner && f.inner ? *f.inner : f.values;
    if (!inner && f.quality[i] == Quality::outside_domain) return 0.0;
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += vals(i, c) * g.v(i, c) - vals(i, d + c) * g.u(i, c);
    if (!std::isfinite(s))
      throw StructuralError("operator is undefined at t = " + std::to_string(f.values.time(i)));
    return s;
  });
}

SelfAdjointness selfadjointness_residual(const VectorField& x, const PhasePath& path,
                                         std::size_t trials, std::uint64_t seed, Execution exec) {
  return trial_statistic(x, path, trials, seed, exec, Form::direct);
}

SelfAdjointness adjoint_consistency_residual(const VectorField& x, const PhasePath& path,
                                             std::size_t trials, std::uint64_t seed,
                                             Execution exec) {
  return trial_statistic(x, path, trials, seed, exec, Form::adjoint);
}

PhasePath reference_path(const TimeScale& ts, std::size_t dim, double radius) {
  GridFunction q = GridFunction::sample(ts, dim, [&](double t, std::span<double> out) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = radius * std::sin(t + static_cast<double>(i));
  });
  GridFunction p = GridFunction::sample(ts, dim, [&](double t, std::span<double> out) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = radius * std::cos(t + static_cast<double>(i));
  });
  return {std::move(q), std::move(p)};
}

}  // namespace tsh
