#include "tsh/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tsh/calculus.hpp"
#include "tsh/dynamics.hpp"

namespace tsh {

namespace {

std::size_t sigma_index(const Grid& g, std::size_t i) {
  return (i + 1 < g.size() && !g.dense_interval(i)) ? i + 1 : i;
}

}  // namespace

DynamicEquation::DynamicEquation(RhsFunction f, std::size_t dim, TimeScale ts)
    : f_(std::move(f)), dim_(dim), ts_(std::move(ts)) {
  if (dim_ == 0) throw std::invalid_argument("DynamicEquation: dimension must be >= 1");
}

GridFunction DynamicEquation::solve(std::span<const double> x0) const {
  if (x0.size() != dim_) throw std::invalid_argument("DynamicEquation::solve: wrong initial dimension");
  const Grid& g = ts_.grid();
  GridFunction x(ts_, dim_);
  std::copy(x0.begin(), x0.end(), x.at(0).begin());
  std::vector<double> k1(dim_), k2(dim_), k3(dim_), k4(dim_), tmp(dim_);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double t = g.points[k];
    const double h = g.points[k + 1] - t;
    const auto xk = x.at(k);
    auto next = x.at(k + 1);
    f_(t, xk, k1);
    if (!g.dense_interval(k)) {
      for (std::size_t c = 0; c < dim_; ++c) next[c] = xk[c] + h * k1[c];
      continue;
    }
    for (std::size_t c = 0; c < dim_; ++c) tmp[c] = xk[c] + 0.5 * h * k1[c];
    f_(t + 0.5 * h, tmp, k2);
    for (std::size_t c = 0; c < dim_; ++c) tmp[c] = xk[c] + 0.5 * h * k2[c];
    f_(t + 0.5 * h, tmp, k3);
    for (std::size_t c = 0; c < dim_; ++c) tmp[c] = xk[c] + h * k3[c];
    f_(t + h, tmp, k4);
    for (std::size_t c = 0; c < dim_; ++c)
      next[c] = xk[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return x;
}

DynamicEquation embed_ode(RhsFunction f, std::size_t dim, const TimeScale& ts) {
  return {std::move(f), dim, ts};
}

IntegralEquation::IntegralEquation(RhsFunction f, std::size_t dim, TimeScale ts)
    : f_(std::move(f)), dim_(dim), ts_(std::move(ts)) {
  if (dim_ == 0) throw std::invalid_argument("IntegralEquation: dimension must be >= 1");
}

GridFunction IntegralEquation::apply(const GridFunction& x) const {
  if (x.dim() != dim_ || !x.scale().same_grid(ts_))
    throw std::invalid_argument("IntegralEquation::apply: argument lives on another grid or dimension");
  const Grid& g = ts_.grid();
  GridFunction integrand(ts_, dim_);
  for (std::size_t i = 0; i < g.size(); ++i) f_(g.points[i], x.at(i), integrand.at(i));
  const GridFunction u = antiderivative(integrand).values;
  GridFunction out(ts_, dim_);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t s = sigma_index(g, i);
    for (std::size_t c = 0; c < dim_; ++c) out(i, c) = x(0, c) + u(s, c);
  }
  return out;
}

GridFunction IntegralEquation::solve(std::span<const double> xa, double tol, std::size_t max_sweeps) const {
  if (xa.size() != dim_) throw std::invalid_argument("IntegralEquation::solve: wrong initial dimension");
  GridFunction x = GridFunction::constant(ts_, xa);
  double change = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    GridFunction next = apply(x);
    // x(a) is the constant of the equation, not an unknown.
    std::copy(xa.begin(), xa.end(), next.at(0).begin());
    change = sup_norm(next - x);
    x = std::move(next);
    if (change <= tol) return x;
  }
  throw ConvergenceError("integral equation: Picard iteration did not converge (last change " +
                         std::to_string(change) + ")");
}

IntegralEquation embed_integral_equation(RhsFunction f, std::size_t dim, const TimeScale& ts) {
  return {std::move(f), dim, ts};
}

DeltaFunctional::DeltaFunctional(Lagrangian l) : l_(std::move(l)) {}

GridFunction DeltaFunctional::running(const GridFunction& x) const {
  const TimeScale& ts = x.scale();
  const Grid& g = ts.grid();
  const RestrictedDomains dom = ts.restricted_domains();
  const GridFunction u = antiderivative(ts, [&](std::size_t i, bool inner) {
    const std::vector<double> v = inner ? dense_derivative(x, i) : delta_derivative(x, i);
    return l_(g.points[i], x.at(i), v);
  }).values;
  GridFunction out(ts, 1);
  for (std::size_t i = 0; i < g.size(); ++i)
    out(i, 0) = dom.in_upper(g.points[i]) ? u(sigma_index(g, i), 0) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double DeltaFunctional::operator()(const GridFunction& x) const {
  const GridFunction r = running(x);
  const TimeScale& ts = x.scale();
  return r(ts.index_of(ts.rho(ts.max())), 0);
}

DeltaFunctional embed_functional(Lagrangian l) { return DeltaFunctional(std::move(l)); }

}  // namespace tsh
