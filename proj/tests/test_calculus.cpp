#include <doctest.h>

#include <cmath>
#include <random>

#include "tsh/calculus.hpp"

using namespace tsh;

namespace {

GridFunction scalar(const TimeScale& ts, double (*f)(double)) { return GridFunction::scalar(ts, f); }

double sq(double t) { return t * t; }
double id(double t) { return t; }
double one(double) { return 1.0; }

TimeScale mixed() { return TimeScale({{0.0, 0.5}, {0.6, 0.6}, {0.75, 0.75}, {0.9, 1.4}, {1.6, 1.6}}, 0.01); }

// Random boundary-vanishing polynomial on [a, b].
GridFunction bump(const TimeScale& ts, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = u(gen), c1 = u(gen), c2 = u(gen);
  const double a = ts.min(), b = ts.max();
  return GridFunction::scalar(ts, [=](double t) { return (t - a) * (b - t) * (c0 + c1 * t + c2 * t * t); });
}

}  // namespace

TEST_CASE("delta derivative examples") {
  CHECK(delta_derivative(scalar(TimeScale::from_points({0, 1, 2}), sq), 1.0)[0] == 3.0);
  const TimeScale unit = TimeScale::interval(0.0, 1.0, 0.001);
  CHECK(std::abs(delta_derivative(scalar(unit, sq), 0.5)[0] - 1.0) <= 1e-6);
  CHECK(delta_derivative(scalar(TimeScale({{0.0, 1.0}, {2.0, 2.0}}, 0.01), id), 1.0)[0] == 1.0);
}

TEST_CASE("nabla derivative examples") {
  CHECK(nabla_derivative(scalar(TimeScale::from_points({0, 1, 2}), sq), 1.0)[0] == 1.0);
  const TimeScale unit = TimeScale::interval(0.0, 1.0, 0.001);
  CHECK(std::abs(nabla_derivative(scalar(unit, sq), 0.5)[0] - 1.0) <= 1e-6);
  CHECK(nabla_derivative(scalar(TimeScale({{0.0, 1.0}, {2.0, 2.0}}, 0.01), id), 2.0)[0] == 1.0);
}

TEST_CASE("derivatives outside their domains") {
  const GridFunction f = scalar(TimeScale::from_points({0, 1, 2}), sq);
  CHECK_THROWS_AS(delta_derivative(f, 2.0), DomainError);
  CHECK_THROWS_AS(nabla_derivative(f, 0.0), DomainError);
  CHECK_THROWS_AS(delta_derivative(f, 0.5), DomainError);
}

TEST_CASE("scattered quotients are exact") {
  const TimeScale ts = mixed();
  const GridFunction f = GridFunction::scalar(ts, [](double t) { return std::exp(t); });
  const double t = 0.6;
  const double expected = (std::exp(0.75) - std::exp(0.6)) / (0.75 - 0.6);
  CHECK(delta_derivative(f, t)[0] == expected);
}

TEST_CASE("dense derivatives are fourth order") {
  const TimeScale coarse = TimeScale::interval(0.0, 1.0, 0.02);
  const TimeScale fine = TimeScale::interval(0.0, 1.0, 0.01);
  auto err = [](const TimeScale& ts) {
    const GridFunction f = GridFunction::scalar(ts, [](double t) { return std::sin(3.0 * t); });
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      e = std::max(e, std::abs(delta_derivative(f, i)[0] - 3.0 * std::cos(3.0 * f.time(i))));
    return e;
  };
  CHECK(err(coarse) / err(fine) > 12.0);
}

TEST_CASE("delta integral examples") {
  const TimeScale h = TimeScale::uniform(0.0, 0.1, 10);
  CHECK(delta_integral(scalar(h, one)) == doctest::Approx(1.0).epsilon(1e-15));
  double oracle = 0.0;
  for (std::size_t k = 0; k + 1 < h.grid().size(); ++k) {
    const double t = h.grid().points[k];
    oracle += (h.grid().points[k + 1] - t) * t;
  }
  CHECK(std::abs(delta_integral(scalar(h, id)) - oracle) <= 1e-15);
  CHECK(std::abs(oracle - 0.45) <= 1e-14);
  CHECK(std::abs(delta_integral(scalar(TimeScale::interval(0.0, 1.0), id)) - 0.5) <= 1e-10);
}

TEST_CASE("antiderivative") {
  const TimeScale ts = mixed();
  const Antiderivative u = antiderivative(GridFunction::scalar(ts, [](double) { return 2.5; }));
  CHECK(u.values(0, 0) == 0.0);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    CHECK(u.values(i, 0) == doctest::Approx(2.5 * u.values.time(i)).epsilon(1e-13));
  const Antiderivative z = antiderivative(GridFunction(ts, 2));
  CHECK(sup_norm(z.values) == 0.0);
}

TEST_CASE("integral orientation, additivity and linearity") {
  const TimeScale ts = mixed();
  const GridFunction f = GridFunction::scalar(ts, [](double t) { return std::cos(t) + t; });
  const GridFunction g = GridFunction::scalar(ts, [](double t) { return t * t * t; });
  const double a = delta_integral(f, 0.0, 0.6)[0];
  const double b = delta_integral(f, 0.6, 1.4)[0];
  const double c = delta_integral(f, 0.0, 1.4)[0];
  CHECK(std::abs(a + b - c) <= 1e-12 * std::abs(c));
  CHECK(delta_integral(f, 1.4, 0.0)[0] == -c);
  const double lin = delta_integral(2.0 * f + (-3.0) * g);
  CHECK(std::abs(lin - (2.0 * delta_integral(f) - 3.0 * delta_integral(g))) <= 1e-13);
  CHECK_THROWS_AS(delta_integral(f, 0.0, 0.55), DomainError);
}

TEST_CASE("derivative linearity at scattered points") {
  const TimeScale ts = TimeScale::from_points({0.0, 0.3, 0.45, 1.0, 1.7});
  const GridFunction f = scalar(ts, sq);
  const GridFunction g = GridFunction::scalar(ts, [](double t) { return std::sin(t); });
  for (std::size_t i = 0; i + 1 < ts.grid().size(); ++i) {
    const double lhs = delta_derivative(f + g, i)[0];
    const double rhs = delta_derivative(f, i)[0] + delta_derivative(g, i)[0];
    CHECK(std::abs(lhs - rhs) <= 1e-14 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("constant characterization on scattered scales") {
  const TimeScale ts = TimeScale::from_points({0.0, 0.2, 0.7, 1.1, 2.0});
  const GridFunction c = GridFunction::scalar(ts, [](double) { return 4.0; });
  const DerivedFunction dc = delta_derivative_all(c);
  for (std::size_t i = 0; i + 1 < ts.grid().size(); ++i) CHECK(dc.values(i, 0) == 0.0);
  const DerivedFunction dn = delta_derivative_all(GridFunction::scalar(ts, [](double t) { return t == 0.7 ? 1.0 : 0.0; }));
  bool nonzero = false;
  for (std::size_t i = 0; i + 1 < ts.grid().size(); ++i) nonzero = nonzero || dn.values(i, 0) != 0.0;
  CHECK(nonzero);
}

TEST_CASE("derivative_all flags junctions and the excluded end") {
  const TimeScale ts({{0.0, 0.0}, {0.5, 1.0}, {1.5, 1.5}}, 0.05);
  const GridFunction f = GridFunction::scalar(ts, [](double t) { return t * t; });
  const DerivedFunction d = delta_derivative_all(f, Execution::serial);
  CHECK(d.quality[ts.index_of(0.5)] == Quality::junction);
  CHECK(d.quality[ts.index_of(1.0)] == Quality::junction);
  CHECK(d.quality.back() == Quality::outside_domain);
  CHECK(std::isnan(d.values(ts.grid().size() - 1, 0)));
  CHECK(d.quality[ts.index_of(0.75)] == Quality::ok);
}

TEST_CASE("serial and parallel derivatives are bit-identical") {
  const TimeScale ts = TimeScale({{0.0, 2.0}, {2.5, 2.5}, {3.0, 5.0}}, 1e-3);
  const GridFunction f = GridFunction::sample(ts, 2, [](double t, std::span<double> out) {
    out[0] = std::sin(t);
    out[1] = std::exp(-t) * t;
  });
  const DerivedFunction s = delta_derivative_all(f, Execution::serial);
  const DerivedFunction p = delta_derivative_all(f, Execution::parallel);
  const auto sv = s.values.values(), pv = p.values.values();
  CHECK(std::equal(sv.begin(), sv.end(), pv.begin(), [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  }));
  const DerivedFunction sn = nabla_derivative_all(f, Execution::serial);
  const DerivedFunction pn = nabla_derivative_all(f, Execution::parallel);
  const auto snv = sn.values.values(), pnv = pn.values.values();
  CHECK(std::equal(snv.begin(), snv.end(), pnv.begin(), [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  }));
}

TEST_CASE("inverse identity") {
  CHECK(inverse_identity_residual(TimeScale::from_points({0.0, 0.5, 2.0}), 0.5) == 0.0);
  CHECK(inverse_identity_residual(TimeScale::interval(0.0, 1.0), 0.5) <= 1e-10);
  CHECK(inverse_identity_residual(TimeScale::uniform(0.0, 0.1, 10), 0.5) == 0.0);
  const TimeScale ts({{0.0, 1.0}, {1.5, 1.5}, {2.0, 2.0}}, 0.01);
  CHECK_THROWS_AS(inverse_identity_residual(ts, 1.0), StructuralError);
  CHECK_THROWS_AS(inverse_identity_residual(ts, 2.0), DomainError);
  // Irregular scattered gaps: exact through the Ratio representation.
  const TimeScale odd = TimeScale::from_points({0.0, 0.1, 0.37, 0.38, 1.0 / 3.0 + 1.0});
  CHECK(inverse_identity_residual(odd, 0.37) == 0.0);
  CHECK(inverse_identity_residual(odd, 0.38) == 0.0);
}

TEST_CASE("composition identity") {
  const TimeScale three = TimeScale::from_points({0, 1, 2});
  CHECK(composition_identity_residual(scalar(three, id), 1.0) == 0.0);
  const TimeScale h = TimeScale::uniform(0.0, 0.125, 8);
  const GridFunction f = scalar(h, sq);
  for (std::size_t i = 1; i + 1 < h.grid().size(); ++i) {
    // (u∘σ)^∇(t) = ((t+h)^2 - t^2)/h = σ^∇(t) u^Δ(t) with σ^∇ = 1 on hZ.
    CHECK(composition_identity_residual(f, h.grid().points[i]) == 0.0);
    CHECK(composition_identity_residual_dual(f, h.grid().points[i]) == 0.0);
  }
  const TimeScale unit = TimeScale::interval(0.0, 1.0);
  const GridFunction s = GridFunction::scalar(unit, [](double t) { return std::sin(2.0 * t); });
  for (double t : {0.0, 0.3, 0.5, 1.0}) {
    CHECK(composition_identity_residual(s, t) <= 1e-6);
    CHECK(composition_identity_residual_dual(s, t) <= 1e-6);
  }
  const TimeScale junction({{0.0, 1.0}, {1.5, 1.5}, {2.0, 2.0}}, 0.01);
  CHECK_THROWS_AS(composition_identity_residual(scalar(junction, id), 1.0), StructuralError);
}

TEST_CASE("integration by parts examples") {
  const TimeScale three = TimeScale::from_points({0, 1, 2});
  CHECK(ibp_residual_i(scalar(three, one), scalar(three, one), 0.0, 2.0) == 0.0);
  CHECK(ibp_residual_ii(scalar(three, one), scalar(three, one), 0.0, 2.0) == 0.0);
  // By hand: ∫ t·1 Δt over {0,1} = 1; [t^2]_0^2 - ∫ 1·σ(t) = 4 - 3 = 1;
  // [ρ(t) t]_0^2 - ∫ ρ^Δ·1·t = 2 - 1 = 1.
  CHECK(ibp_residual_i(scalar(three, id), scalar(three, id), 0.0, 2.0) <= 1e-15);
  CHECK(ibp_residual_ii(scalar(three, id), scalar(three, id), 0.0, 2.0) <= 1e-15);
  const TimeScale unit = TimeScale::interval(0.0, 1.0);
  const GridFunction s = GridFunction::scalar(unit, [](double t) { return std::sin(t); });
  const GridFunction c = GridFunction::scalar(unit, [](double t) { return std::cos(t); });
  CHECK(ibp_residual_i(s, c, 0.0, 1.0) <= 1e-8);
  CHECK(ibp_residual_ii(s, c, 0.0, 1.0) <= 1e-8);
}

TEST_CASE("integration by parts on a mixed scale") {
  const TimeScale ts({{0.0, 0.5}, {0.6, 0.6}, {0.75, 0.75}, {0.9, 1.4}}, 0.01);
  const GridFunction f = GridFunction::scalar(ts, [](double t) { return std::sin(2.0 * t) + t; });
  const GridFunction g = GridFunction::scalar(ts, [](double t) { return std::exp(-t) * t * t; });
  const double tol = std::max(1e-10, 10.0 * 0.01 * 0.01 * sup_norm(f) * sup_norm(g));
  CHECK(ibp_residual_i(f, g, 0.0, 1.4) <= tol);
  CHECK(ibp_residual_i(f, g, 0.2, 0.9) <= tol);
  // rho is Delta-differentiable everywhere before the LS∩RD point 0.9.
  CHECK(ibp_residual_ii(f, g, 0.0, 0.75) <= tol);
  CHECK_THROWS_AS(ibp_residual_ii(f, g, 0.0, 1.4), StructuralError);
}

TEST_CASE("strong Dubois-Reymond witness") {
  const TimeScale ts = mixed();
  std::mt19937_64 gen(7);
  const GridFunction q = GridFunction::scalar(ts, [](double) { return 1.7; });
  for (int k = 0; k < 100; ++k) {
    const GridFunction w = bump(ts, gen);
    const double v = delta_integral(ts, [&](std::size_t i, bool inner) {
      return q(i, 0) * (inner ? dense_derivative(w, i)[0] : delta_derivative(w, i)[0]);
    });
    CHECK(std::abs(v) <= 1e-10);
  }
  // Non-constant q on a scattered scale: w = ∫(q - mean) vanishes at both ends
  // and makes the integral equal to ∫(q - mean)^2.
  const TimeScale sc = TimeScale::from_points({0.0, 0.2, 0.5, 0.6, 0.9, 1.3, 1.5});
  const GridFunction qs = GridFunction::scalar(sc, [](double t) { return std::cos(4.0 * t); });
  const double mean = delta_integral(qs) / (sc.max() - sc.min());
  GridFunction centred = qs;
  for (std::size_t i = 0; i < centred.size(); ++i) centred(i, 0) -= mean;
  const GridFunction w = antiderivative(centred).values;
  CHECK(std::abs(w(w.size() - 1, 0)) <= 1e-14);
  const double v = delta_integral(sc, [&](std::size_t i, bool) { return qs(i, 0) * delta_derivative(w, i)[0]; });
  CHECK(v > 0.01);
}

TEST_CASE("weak Dubois-Reymond witness") {
  const TimeScale ts = mixed();
  const double a = ts.min(), b = ts.max();
  auto weak = [&](const GridFunction& q) {
    const GridFunction w = GridFunction::scalar(ts, [&](double t) {
      return (t - a) * (t - a) * (t - b) * (t - b) * q(ts.index_of(t), 0);
    });
    return delta_integral(pointwise_dot(q, w));
  };
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n;
  for (int k = 0; k < 20; ++k) {
    GridFunction q(ts, 1);
    for (std::size_t i = 0; i < q.size(); ++i) q(i, 0) = n(gen);
    CHECK(weak(q) >= 0.0);
  }
  GridFunction spike(ts, 1);
  spike(ts.index_of(0.75), 0) = 1.0;
  CHECK(weak(spike) > 0.0);
  GridFunction ends(ts, 1);
  ends(0, 0) = 1.0;
  ends(ends.size() - 1, 0) = -2.0;
  CHECK(weak(ends) == 0.0);
}
