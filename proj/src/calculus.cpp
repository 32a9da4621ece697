#include "tsh/calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace tsh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Five-point first-derivative weights (times 1/12h) for the derivative at
// position j of the stencil x_0..x_4.
constexpr std::array<std::array<double, 5>, 5> kStencil{{
    {-25.0, 48.0, -36.0, 16.0, -3.0},
    {-3.0, -10.0, 18.0, -6.0, 1.0},
    {1.0, -8.0, 0.0, 8.0, -1.0},
    {-1.0, 6.0, -18.0, 10.0, 3.0},
    {3.0, -16.0, 36.0, -48.0, 25.0},
}};

std::string at_str(double t) {
  return "t = " + std::to_string(t);
}

bool b_left_scattered(const TimeScale& ts) {
  return ts.classify(ts.max()).left_scattered();
}

bool a_right_scattered(const TimeScale& ts) {
  return ts.classify(ts.min()).right_scattered();
}

std::vector<double> difference_quotient(const GridFunction& f, std::size_t hi, std::size_t lo,
                                        double gap) {
  std::vector<double> out(f.dim());
  for (std::size_t c = 0; c < f.dim(); ++c) out[c] = (f(hi, c) - f(lo, c)) / gap;
  return out;
}

// Indices where sigma (resp. rho) jumps: RS∩LD (resp. LS∩RD) points.
std::vector<bool> discontinuity_mask(const TimeScale& ts, bool sigma_side) {
  const Grid& g = ts.grid();
  std::vector<bool> mask(g.size(), false);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_sample[i]) continue;
    const JumpRegularity j = ts.jump_regularity(g.points[i]);
    mask[i] = sigma_side ? !j.sigma_continuous : !j.rho_continuous;
  }
  return mask;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) s += x[c] * y[c];
  return s;
}

}  // namespace

std::vector<bool> junction_mask(const TimeScale& ts) {
  std::vector<bool> mask(ts.grid().size(), false);
  for (double t : ts.admissibility_report()) mask[ts.index_of(t)] = true;
  return mask;
}

std::vector<double> dense_derivative(const GridFunction& f, std::size_t i,
                                     const std::vector<bool>* excluded) {
  const Grid& g = f.scale().grid();
  const Grid::SegmentRange& r = g.ranges[g.segment[i]];
  if (r.step == 0.0)
    throw StructuralError(at_str(g.points[i]) + " is right-dense but has no dense neighbour samples");
  std::size_t first = r.first;
  std::size_t last = r.last;
  if (excluded != nullptr) {
    if ((*excluded)[first] && first != i) ++first;
    if ((*excluded)[last] && last != i) --last;
  }
  if (last - first < 4)
    throw StructuralError(at_str(g.points[i]) + ": dense segment too short for a five-point stencil");
  const std::size_t s = std::clamp(i < 2 ? first : i - 2, first, last - 4);
  const auto& w = kStencil[i - s];
  const double scale = 1.0 / (12.0 * r.step);
  std::vector<double> out(f.dim());
  for (std::size_t c = 0; c < f.dim(); ++c) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) acc += w[k] * f(s + k, c);
    out[c] = acc * scale;
  }
  return out;
}

std::vector<double> delta_derivative(const GridFunction& f, std::size_t i) {
  const TimeScale& ts = f.scale();
  const Grid& g = ts.grid();
  const double t = g.points[i];
  if (i + 1 == g.size()) {
    if (b_left_scattered(ts))
      throw DomainError(at_str(t) + " is not in T^kappa (b is left-scattered)");
    return dense_derivative(f, i);
  }
  if (!g.dense_interval(i)) return difference_quotient(f, i + 1, i, ts.mu(t));
  return dense_derivative(f, i);
}

std::vector<double> delta_derivative(const GridFunction& f, double t) {
  return delta_derivative(f, f.scale().index_of(t));
}

std::vector<double> nabla_derivative(const GridFunction& f, std::size_t i) {
  const TimeScale& ts = f.scale();
  const Grid& g = ts.grid();
  const double t = g.points[i];
  if (i == 0) {
    if (a_right_scattered(ts))
      throw DomainError(at_str(t) + " is not in T_kappa (a is right-scattered)");
    return dense_derivative(f, i);
  }
  if (!g.dense_interval(i - 1)) return difference_quotient(f, i, i - 1, ts.nu(t));
  return dense_derivative(f, i);
}

std::vector<double> nabla_derivative(const GridFunction& f, double t) {
  return nabla_derivative(f, f.scale().index_of(t));
}

namespace {

template <class Derive>
DerivedFunction derivative_all(const GridFunction& f, Execution exec, std::size_t excluded_index,
                               Derive&& derive) {
  const TimeScale& ts = f.scale();
  const std::vector<bool> junction = junction_mask(ts);
  DerivedFunction out{GridFunction(ts, f.dim()), std::vector<Quality>(f.size(), Quality::ok), std::nullopt};
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    auto dst = out.values.at(i);
    if (i == excluded_index) {
      std::fill(dst.begin(), dst.end(), kNaN);
      out.quality[i] = Quality::outside_domain;
      continue;
    }
    const std::vector<double> v = derive(f, i);
    std::copy(v.begin(), v.end(), dst.begin());
    if (junction[i]) out.quality[i] = Quality::junction;
  }
  return out;
}

}  // namespace

DerivedFunction delta_derivative_all(const GridFunction& f, Execution exec) {
  const std::size_t skip = b_left_scattered(f.scale()) ? f.size() - 1 : f.size();
  return derivative_all(f, exec, skip, [](const GridFunction& u, std::size_t i) {
    return delta_derivative(u, i);
  });
}

DerivedFunction nabla_derivative_all(const GridFunction& f, Execution exec) {
  const std::size_t skip = a_right_scattered(f.scale()) ? 0 : f.size();
  return derivative_all(f, exec, skip, [](const GridFunction& u, std::size_t i) {
    return nabla_derivative(u, i);
  });
}

Antiderivative antiderivative(const GridFunction& f) { return antiderivative(f, f); }

Antiderivative antiderivative(const GridFunction& point, const GridFunction& inner) {
  point.require_compatible(inner, "antiderivative");
  const TimeScale& ts = point.scale();
  const Grid& g = ts.grid();
  const std::size_t n = point.dim();
  const GridFunction& f = inner;
  GridFunction u(ts, n);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const std::size_t j = i + 1;
    if (!g.dense_interval(i)) {
      const double mu = ts.mu(g.points[i]);
      for (std::size_t c = 0; c < n; ++c) u(j, c) = u(i, c) + mu * point(i, c);
      continue;
    }
    const Grid::SegmentRange& r = g.ranges[g.segment[i]];
    const std::size_t k = j - r.first;
    const double h = r.step;
    if (k % 2 == 0) {
      // Simpson from the previous even node keeps even nodes O(h^4) exact.
      for (std::size_t c = 0; c < n; ++c)
        u(j, c) = u(j - 2, c) + h / 3.0 * (f(j - 2, c) + 4.0 * f(j - 1, c) + f(j, c));
    } else {
      // One interval of a cubic through four nodes of the segment (there are
      // at least seven). A quadratic here leaves O(h^4) noise on odd nodes,
      // which derivative stencils turn into O(h^3).
      if (j + 2 <= r.last) {
        for (std::size_t c = 0; c < n; ++c)
          u(j, c) = u(i, c) + h / 24.0 * (9.0 * f(i, c) + 19.0 * f(j, c) - 5.0 * f(j + 1, c) + f(j + 2, c));
      } else {
        for (std::size_t c = 0; c < n; ++c)
          u(j, c) = u(i, c) + h / 24.0 * (-f(i - 1, c) + 13.0 * f(i, c) + 13.0 * f(j, c) - f(j + 1, c));
      }
    }
  }
  return {std::move(u)};
}

bool dense_endpoint(const Grid& g, std::size_t i) {
  const Grid::SegmentRange& r = g.ranges[g.segment[i]];
  return r.first != r.last && (i == r.first || i == r.last);
}

Antiderivative antiderivative(const TimeScale& ts, const IndexedIntegrand& f) {
  const Grid& g = ts.grid();
  GridFunction point(ts, 1);
  GridFunction inner(ts, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool gap_start = i + 1 < g.size() && !g.dense_interval(i);
    const bool endpoint = dense_endpoint(g, i);
    const bool interior = !endpoint && g.ranges[g.segment[i]].first != g.ranges[g.segment[i]].last;
    if (gap_start || interior) point(i, 0) = f(i, false);
    inner(i, 0) = endpoint ? f(i, true) : point(i, 0);
  }
  return antiderivative(point, inner);
}

double delta_integral(const TimeScale& ts, const IndexedIntegrand& f) {
  return antiderivative(ts, f).values(ts.grid().size() - 1, 0);
}

std::vector<double> delta_integral(const GridFunction& f, double c, double d) {
  const TimeScale& ts = f.scale();
  const std::size_t ic = ts.index_of(c);
  const std::size_t id = ts.index_of(d);
  const Antiderivative u = antiderivative(f);
  std::vector<double> out(f.dim());
  for (std::size_t k = 0; k < f.dim(); ++k) out[k] = u.values(id, k) - u.values(ic, k);
  return out;
}

double delta_integral(const GridFunction& f) {
  if (f.dim() != 1) throw std::invalid_argument("delta_integral: expected a scalar grid function");
  const Antiderivative u = antiderivative(f);
  return u.values(f.size() - 1, 0);
}

std::optional<Ratio> rho_delta(const TimeScale& ts, double t) {
  if (!ts.restricted_domains().in_upper(t))
    throw DomainError(at_str(t) + " is not in T^kappa");
  const PointClass c = ts.classify(t);
  if (c.right_scattered()) return Ratio{ts.rho(ts.sigma(t)) - ts.rho(t), ts.mu(t)};
  if (c.left_scattered()) return std::nullopt;
  return Ratio{1.0, 1.0};
}

std::optional<Ratio> sigma_nabla(const TimeScale& ts, double t) {
  if (!ts.restricted_domains().in_lower(t))
    throw DomainError(at_str(t) + " is not in T_kappa");
  const PointClass c = ts.classify(t);
  if (c.left_scattered()) return Ratio{ts.sigma(t) - ts.sigma(ts.rho(t)), ts.nu(t)};
  if (c.right_scattered()) return std::nullopt;
  return Ratio{1.0, 1.0};
}

double inverse_identity_residual(const TimeScale& ts, double t) {
  if (!ts.restricted_domains().in_both(t))
    throw DomainError(at_str(t) + " is not in T^kappa_kappa");
  const auto r = rho_delta(ts, t);
  const auto s = sigma_nabla(ts, t);
  if (!r || !s) throw StructuralError(at_str(t) + " is a junction point; rho^Delta sigma^nabla is undefined");
  return std::abs((r->num * s->num) / (r->den * s->den) - 1.0);
}

GridFunction compose_sigma(const GridFunction& f) {
  const Grid& g = f.scale().grid();
  GridFunction out(f.scale(), f.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t src = (i + 1 < g.size() && !g.dense_interval(i)) ? i + 1 : i;
    std::copy(f.at(src).begin(), f.at(src).end(), out.at(i).begin());
  }
  return out;
}

GridFunction compose_rho(const GridFunction& f) {
  const Grid& g = f.scale().grid();
  GridFunction out(f.scale(), f.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t src = (i > 0 && !g.dense_interval(i - 1)) ? i - 1 : i;
    std::copy(f.at(src).begin(), f.at(src).end(), out.at(i).begin());
  }
  return out;
}

namespace {

void require_regular(const TimeScale& ts, double t) {
  if (!ts.restricted_domains().in_both(t))
    throw DomainError(at_str(t) + " is not in T^kappa_kappa");
  const JumpRegularity j = ts.jump_regularity(t);
  if (!j.sigma_continuous || !j.rho_continuous)
    throw StructuralError(at_str(t) + " is a junction point");
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) m = std::max(m, std::abs(x[c] - y[c]));
  return m;
}

}  // namespace

double composition_identity_residual(const GridFunction& f, double t) {
  const TimeScale& ts = f.scale();
  require_regular(ts, t);
  const std::size_t i = ts.index_of(t);
  const GridFunction fs = compose_sigma(f);
  std::vector<double> lhs;
  if (ts.classify(t).left_scattered()) {
    lhs = difference_quotient(fs, i, i - 1, ts.nu(t));
  } else {
    const std::vector<bool> mask = discontinuity_mask(ts, true);
    lhs = dense_derivative(fs, i, &mask);
  }
  const double sn = sigma_nabla(ts, t)->value();
  std::vector<double> rhs = delta_derivative(f, i);
  for (double& v : rhs) v *= sn;
  return max_abs_diff(lhs, rhs);
}

double composition_identity_residual_dual(const GridFunction& f, double t) {
  const TimeScale& ts = f.scale();
  require_regular(ts, t);
  const std::size_t i = ts.index_of(t);
  const GridFunction fr = compose_rho(f);
  std::vector<double> lhs;
  if (ts.classify(t).right_scattered()) {
    lhs = difference_quotient(fr, i + 1, i, ts.mu(t));
  } else {
    const std::vector<bool> mask = discontinuity_mask(ts, false);
    lhs = dense_derivative(fr, i, &mask);
  }
  const double rd = rho_delta(ts, t)->value();
  std::vector<double> rhs = nabla_derivative(f, i);
  for (double& v : rhs) v *= rd;
  return max_abs_diff(lhs, rhs);
}

double ibp_residual_i(const GridFunction& f, const GridFunction& g, double c, double d) {
  f.require_compatible(g, "ibp_residual_i");
  const TimeScale& ts = f.scale();
  const std::size_t ic = ts.index_of(c);
  const std::size_t id = ts.index_of(d);
  const GridFunction gs = compose_sigma(g);

  // Inside a dense segment g∘sigma = g and both derivatives are classical.
  const Antiderivative l = antiderivative(ts, [&](std::size_t i, bool inner) {
    return dot(f.at(i), inner ? dense_derivative(g, i) : delta_derivative(g, i));
  });
  const Antiderivative r = antiderivative(ts, [&](std::size_t i, bool inner) {
    return inner ? dot(dense_derivative(f, i), g.at(i)) : dot(delta_derivative(f, i), gs.at(i));
  });
  const double lhs = l.values(id, 0) - l.values(ic, 0);
  const double boundary = dot(f.at(id), g.at(id)) - dot(f.at(ic), g.at(ic));
  const double rhs = boundary - (r.values(id, 0) - r.values(ic, 0));
  return std::abs(lhs - rhs);
}

double ibp_residual_ii(const GridFunction& f, const GridFunction& g, double c, double d) {
  f.require_compatible(g, "ibp_residual_ii");
  const TimeScale& ts = f.scale();
  const Grid& grid = ts.grid();
  const std::size_t ic = ts.index_of(c);
  const std::size_t id = ts.index_of(d);
  const GridFunction fr = compose_rho(f);

  const std::size_t lo = std::min(ic, id);
  const std::size_t hi = std::max(ic, id);
  for (std::size_t i = lo; i < hi; ++i) {
    if (!rho_delta(ts, grid.points[i]))
      throw StructuralError(at_str(grid.points[i]) +
                            " lies in the integration range and rho is not Delta-differentiable there");
  }
  const Antiderivative l = antiderivative(ts, [&](std::size_t i, bool inner) {
    return dot(f.at(i), inner ? dense_derivative(g, i) : delta_derivative(g, i));
  });
  // rho^Delta is 1 inside dense segments.
  const Antiderivative r = antiderivative(ts, [&](std::size_t i, bool inner) {
    if (inner) return dot(dense_derivative(f, i), g.at(i));
    const auto rd = rho_delta(ts, grid.points[i]);
    if (!rd || rd->num == 0.0) return 0.0;  // includes a right-scattered a, where f^nabla is undefined
    return rd->value() * dot(nabla_derivative(f, i), g.at(i));
  });
  const double lhs = l.values(id, 0) - l.values(ic, 0);
  const double boundary = dot(fr.at(id), g.at(id)) - dot(fr.at(ic), g.at(ic));
  const double rhs = boundary - (r.values(id, 0) - r.values(ic, 0));
  return std::abs(lhs - rhs);
}

}  // namespace tsh
