#include <doctest.h>

#include <cmath>
#include <random>

#include "tsh/variational.hpp"

using namespace tsh;

namespace {

TimeScale three() { return TimeScale::from_points({0.0, 1.0, 2.0}); }
TimeScale irregular() { return TimeScale::from_points({0.0, 0.3, 0.7, 1.2, 2.0, 2.1}); }
TimeScale mixed() { return TimeScale({{0.0, 0.0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}, {0.4, 0.4}, {0.5, 1.0}}, 0.01); }

VectorField zero_field() { return VectorField::from_strings({"0"}, {"0"}); }
VectorField harmonic() { return VectorField::from_strings({"p1"}, {"-q1"}); }
VectorField damped() { return VectorField::from_strings({"p1"}, {"-q1-0.1*p1"}); }

GridFunction random_function(const TimeScale& ts, std::size_t dim, std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  GridFunction f(ts, dim);
  for (double& x : f.values()) x = n(gen);
  return f;
}

}  // namespace

TEST_CASE("L2 products examples") {
  const TimeScale ts = three();
  const GridFunction one = GridFunction::scalar(ts, [](double) { return 1.0; });
  CHECK(l2_delta(one, one) == 2.0);
  CHECK(l2_delta(GridFunction(ts, 1), one) == 0.0);
  const std::vector<double> ones{1.0, 1.0};
  const TimeScale unit = TimeScale::interval(0.0, 1.0);
  const GridFunction c = GridFunction::constant(unit, ones);
  CHECK(std::abs(l2_delta(c, c) - 2.0) <= 1e-10);
  const std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0};
  const GridFunction f = GridFunction::constant(ts, e1), g = GridFunction::constant(ts, e2);
  CHECK(l2_delta_symplectic(f, g) == 2.0);
  CHECK(l2_delta_symplectic(g, f) == -2.0);
  CHECK(l2_delta_symplectic(f, f) == 0.0);
  CHECK(l2_delta_norm(one) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("symplectic product is antisymmetric and bilinear") {
  std::mt19937_64 gen(1);
  for (const TimeScale& ts : {irregular(), mixed()}) {
    for (int k = 0; k < 20; ++k) {
      const GridFunction f = random_function(ts, 4, gen), g = random_function(ts, 4, gen);
      const GridFunction h = random_function(ts, 4, gen);
      const double fg = l2_delta_symplectic(f, g), gf = l2_delta_symplectic(g, f);
      const double scale = l2_delta_norm(f) * l2_delta_norm(g);
      CHECK(std::abs(fg + gf) <= 1e-12 * scale);
      const double lhs = l2_delta_symplectic(2.5 * f + (-1.5) * h, g);
      const double rhs = 2.5 * fg - 1.5 * l2_delta_symplectic(h, g);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + scale));
      const double lin = l2_delta(0.5 * f + h, g);
      CHECK(std::abs(lin - (0.5 * l2_delta(f, g) + l2_delta(h, g))) <= 1e-12 * (std::abs(lin) + scale));
    }
  }
}

TEST_CASE("action functional examples") {
  const TimeScale ts = three();
  const GridFunction zero(ts, 1);
  const GridFunction q = GridFunction::scalar(ts, [](double t) { return t * t - 3.0 * t; });
  const Hamiltonian h0 = Hamiltonian::from_string("0", 1);
  CHECK(action_functional(h0, PhasePath(q, zero)) == 0.0);
  const Hamiltonian hc = Hamiltonian::from_string("2.5", 1);
  CHECK(action_functional(hc, PhasePath(q, zero)) == -5.0);
  const Hamiltonian ho = Hamiltonian::from_string("(q1^2+p1^2)/2", 1);
  const GridFunction qt = GridFunction::scalar(ts, [](double t) { return t; });
  const GridFunction p1 = GridFunction::scalar(ts, [](double) { return 1.0; });
  CHECK(action_functional(ho, PhasePath(qt, p1)) == 0.5);
  const TimeScale unit = TimeScale::interval(0.0, 2.0);
  CHECK(std::abs(action_functional(hc, PhasePath(GridFunction(unit, 1), GridFunction(unit, 1))) + 5.0) <= 1e-12);
}

TEST_CASE("variations vanish at the ends") {
  const TimeScale ts = mixed();
  const Variation v = random_variation(ts, 2, 9);
  CHECK(v.u(0, 0) == 0.0);
  CHECK(v.v(v.v.size() - 1, 1) == 0.0);
  CHECK(sup_norm(v.u) > 0.0);
  const Variation again = random_variation(ts, 2, 9);
  CHECK(sup_norm(v.u - again.u) == 0.0);
  CHECK(sup_norm(v.u - random_variation(ts, 2, 9, 1).u) > 0.0);
  CHECK_THROWS_AS(Variation(GridFunction::scalar(ts, [](double) { return 1.0; }), GridFunction(ts, 1)),
                  std::invalid_argument);
}

TEST_CASE("Frechet derivative examples") {
  const TimeScale ts = irregular();
  const Hamiltonian ho = Hamiltonian::from_string("(q1^2+p1^2)/2", 1);
  const PhasePath path = reference_path(ts, 1);
  const Variation zero(GridFunction(ts, 1), GridFunction(ts, 1));
  CHECK(frechet_action(ho, path, zero) == 0.0);
  const Variation var = random_variation(ts, 1, 4);
  const Hamiltonian h0 = Hamiltonian::from_string("0", 1);
  // H ≡ 0 reduces to ∫ p u^Δ + v q^Δ; summed by hand over the scattered grid.
  const Grid& g = ts.grid();
  double oracle = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    oracle += path.p(k, 0) * (var.u(k + 1, 0) - var.u(k, 0)) + var.v(k, 0) * (path.q(k + 1, 0) - path.q(k, 0));
  }
  CHECK(frechet_action(h0, path, var) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("Frechet derivative matches differences of the action") {
  const Hamiltonian h = Hamiltonian::from_string("p1^2/2 + 1 - cos(q1) + q1*p1/3", 1);
  for (const TimeScale& ts : {irregular(), mixed()}) {
    const PhasePath path = reference_path(ts, 1, 0.8);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Variation var = random_variation(ts, 1, s);
      const double eps = 1e-5;
      auto shifted = [&](double e) {
        return action_functional(h, PhasePath(path.q + e * var.u, path.p + e * var.v));
      };
      const double fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
      const double exact = frechet_action(h, path, var);
      CHECK(std::abs(fd - exact) <= 1e-4 * std::max(std::abs(exact), 1e-3));
    }
  }
}

TEST_CASE("DO_X of the zero field is the pair of derivatives") {
  const TimeScale ts = irregular();
  const PhasePath path = reference_path(ts, 1);
  const Variation var = random_variation(ts, 1, 2);
  const DerivedFunction out = apply_DOX(zero_field(), path, var);
  const Grid& g = ts.grid();
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double mu = g.points[i + 1] - g.points[i];
    CHECK(out.values(i, 0) == doctest::Approx((var.u(i + 1, 0) - var.u(i, 0)) / mu).epsilon(1e-14));
    CHECK(out.values(i, 1) == doctest::Approx((var.v(i, 0) - var.v(i - 1, 0)) / mu).epsilon(1e-14));
  }
  CHECK(out.quality[0] == Quality::outside_domain);
  CHECK(out.quality.back() == Quality::outside_domain);
  const Variation zero(GridFunction(ts, 1), GridFunction(ts, 1));
  const DerivedFunction z = apply_DOX(harmonic(), path, zero);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(std::abs(z.values(i, 0)) + std::abs(z.values(i, 1)) == 0.0);
}

TEST_CASE("harmonic DO_X in closed form and equal to its adjoint") {
  const TimeScale ts = irregular();
  const PhasePath path = reference_path(ts, 1);
  const Variation var = random_variation(ts, 1, 3);
  const DerivedFunction d = apply_DOX(harmonic(), path, var);
  const DerivedFunction a = apply_adjoint_DOX(harmonic(), path, var);
  const DerivedFunction z = apply_DOX(zero_field(), path, var);
  for (std::size_t i = 1; i + 1 < ts.grid().size(); ++i) {
    // A = D = 0, B = 1, C = -1: (u^Δ - v, ρ^Δ v^∇ + u).
    CHECK(d.values(i, 0) == doctest::Approx(z.values(i, 0) - var.v(i, 0)).epsilon(1e-14));
    CHECK(d.values(i, 1) == doctest::Approx(z.values(i, 1) + var.u(i, 0)).epsilon(1e-14));
    CHECK(d.values(i, 0) == a.values(i, 0));
    CHECK(d.values(i, 1) == a.values(i, 1));
  }
}

TEST_CASE("damped DO_X differs from its adjoint by gamma u") {
  const TimeScale ts = mixed();
  const PhasePath path = reference_path(ts, 1);
  const Variation var = random_variation(ts, 1, 6);
  const DerivedFunction d = apply_DOX(damped(), path, var);
  const DerivedFunction a = apply_adjoint_DOX(damped(), path, var);
  for (std::size_t i = 0; i < ts.grid().size(); ++i) {
    if (d.quality[i] != Quality::ok || a.quality[i] != Quality::ok) continue;
    CHECK(std::abs(std::abs(d.values(i, 0) - a.values(i, 0)) - 0.1 * std::abs(var.u(i, 0))) <= 1e-12);
  }
}

TEST_CASE("adjoint consistency holds for every field") {
  const TimeScale dense_head({{0.0, 0.5}, {0.6, 0.6}, {0.75, 0.75}, {0.9, 0.9}}, 0.01);
  for (const TimeScale& ts : {irregular(), dense_head}) {
    const PhasePath path = reference_path(ts, 2);
    for (const VectorField& x : {VectorField::from_strings({"p1", "q1*p2"}, {"-sin(q1)", "p1*p2-q2"}),
                                 VectorField::from_strings({"p2", "0"}, {"0", "0"})}) {
      const double r = adjoint_consistency_residual(x, path, 50, 17).residual;
      CHECK(r <= std::max(1e-9, 10.0 * ts.dense_step() * ts.dense_step()));
    }
  }
}

TEST_CASE("self-adjointness on a discrete scale") {
  const TimeScale ts = TimeScale::uniform(0.0, 0.1, 10);
  const PhasePath path = reference_path(ts, 1);
  const double harm = selfadjointness_residual(harmonic(), path, 20, 1).residual;
  const double zero = selfadjointness_residual(zero_field(), path, 20, 1).residual;
  const double damp = selfadjointness_residual(damped(), path, 20, 1).residual;
  CHECK(harm <= 1e-9);
  CHECK(zero <= 1e-9);
  CHECK(damp >= 100.0 * std::max(harm, 1e-12));
}

TEST_CASE("self-adjointness on a mixed scale, serial and parallel") {
  const TimeScale ts({{0.0, 0.5}, {0.6, 0.6}, {0.7, 0.7}, {0.8, 0.8}, {0.9, 0.9}, {1.0, 1.0}}, 0.01);
  const PhasePath path = reference_path(ts, 1);
  const SelfAdjointness s = selfadjointness_residual(harmonic(), path, 5, 3, Execution::serial);
  const SelfAdjointness p = selfadjointness_residual(harmonic(), path, 5, 3, Execution::parallel);
  CHECK(s.residual == p.residual);
  CHECK(s.worst_trial == p.worst_trial);
  CHECK(s.residual <= 1e-6);
  CHECK(selfadjointness_residual(damped(), path, 5, 3).residual >= 1e-3);
}

TEST_CASE("pairing refuses undefined operator values") {
  // ρ is not Δ-differentiable at the LS∩RD point 0.5, which is weighted here.
  const TimeScale ts = mixed();
  const PhasePath path = reference_path(ts, 1);
  const Variation var = random_variation(ts, 1, 0);
  const DerivedFunction d = apply_DOX(harmonic(), path, var);
  const std::size_t j = ts.index_of(0.5);
  CHECK(d.quality[j] == Quality::junction);
  CHECK_THROWS_AS(selfadjointness_residual(harmonic(), path, 2, 0), StructuralError);
}
