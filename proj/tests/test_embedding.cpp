#include <doctest.h>

#include <cmath>

#include "tsh/embedding.hpp"
#include "tsh/variational.hpp"

using namespace tsh;

namespace {

void zero_rhs(double, std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }
void identity_rhs(double, std::span<const double> x, std::span<double> out) { out[0] = x[0]; }
void one_rhs(double, std::span<const double>, std::span<double> out) { out[0] = 1.0; }

TimeScale mixed() { return TimeScale({{0.0, 0.5}, {0.6, 0.6}, {0.75, 0.75}, {0.9, 1.4}, {1.6, 1.6}}, 0.01); }

}  // namespace

TEST_CASE("dynamic equation: constant solutions for f = 0") {
  const std::vector<double> x0{2.0, -1.0};
  const GridFunction x = embed_ode(zero_rhs, 2, mixed()).solve(x0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x(i, 0) == 2.0);
    CHECK(x(i, 1) == -1.0);
  }
}

TEST_CASE("dynamic equation: exponential on hZ is the compound product") {
  for (int n : {4, 10, 20}) {
    const double h = 1.0 / n;
    const TimeScale ts = TimeScale::uniform(0.0, h, static_cast<std::size_t>(n));
    const std::vector<double> x0{1.0};
    const GridFunction x = embed_ode(identity_rhs, 1, ts).solve(x0);
    double oracle = 1.0;
    for (int k = 0; k < n; ++k) oracle *= 1.0 + h;
    CHECK(x(x.size() - 1, 0) == doctest::Approx(std::pow(1.0 + h, 1.0 / h)).epsilon(1e-13));
    CHECK(x(x.size() - 1, 0) == doctest::Approx(oracle).epsilon(1e-14));
  }
}

TEST_CASE("dynamic equation: exponential on an interval") {
  const TimeScale ts = TimeScale::interval(0.0, 1.0, 1e-3);
  const std::vector<double> x0{1.0};
  const GridFunction x = embed_ode(identity_rhs, 1, ts).solve(x0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x(i, 0) - std::exp(x.time(i))) <= 1e-6);
}

TEST_CASE("dynamic equation on a mixed scale") {
  // e_1(t, 0): exp over dense stretches, (1 + μ) factors across gaps.
  const TimeScale ts = mixed();
  const std::vector<double> x0{1.0};
  const GridFunction x = embed_ode(identity_rhs, 1, ts).solve(x0);
  const double at_b = std::exp(0.5) * (1.0 + 0.1) * (1.0 + 0.15) * (1.0 + 0.15) * std::exp(0.5) * (1.0 + 0.2);
  CHECK(x(x.size() - 1, 0) == doctest::Approx(at_b).epsilon(1e-9));
}

TEST_CASE("integral equation: f = 0 and f = 1") {
  const TimeScale ts = mixed();
  const std::vector<double> xa{3.0};
  const GridFunction z = embed_integral_equation(zero_rhs, 1, ts).solve(xa);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z(i, 0) == 3.0);
  const GridFunction one = embed_integral_equation(one_rhs, 1, ts).solve(xa);
  for (std::size_t i = 0; i < one.size(); ++i) {
    const double t = one.time(i);
    CHECK(std::abs(one(i, 0) - (3.0 + ts.sigma(t) - ts.min())) <= 1e-12);
  }
}

TEST_CASE("integral equation on hZ against a summation oracle") {
  const TimeScale ts = TimeScale::uniform(0.0, 0.1, 10);
  auto rhs = [](double t, std::span<const double> x, std::span<double> out) { out[0] = std::sin(t) - 0.5 * x[0]; };
  const std::vector<double> xa{1.0};
  const GridFunction x = embed_integral_equation(rhs, 1, ts).solve(xa);
  // x_i = x_a + h Σ_{k<=i} f(t_k, x_k); the k = i term is solved for in closed form.
  const auto& t = ts.grid().points;
  double partial = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    partial += 0.1 * (std::sin(t[i - 1]) - 0.5 * (i == 1 ? 1.0 : x(i - 1, 0)));
    if (i + 1 == t.size()) break;  // σ(b) = b adds nothing at b
    const double xi = (1.0 + partial + 0.1 * std::sin(t[i])) / (1.0 + 0.05);
    CHECK(std::abs(x(i, 0) - xi) <= 1e-12);
  }
}

TEST_CASE("integral equation rejects foreign grids and reports divergence") {
  const IntegralEquation eq = embed_integral_equation(identity_rhs, 1, mixed());
  CHECK_THROWS_AS((void)eq.apply(GridFunction(TimeScale::interval(0.0, 1.0), 1)), std::invalid_argument);
  const std::vector<double> xa{1.0};
  CHECK_THROWS((void)eq.solve(xa, 1e-15, 2));
}

TEST_CASE("functional with H = 0 matches the action") {
  for (const TimeScale& ts : {TimeScale::from_points({0.0, 0.3, 0.7, 1.2, 2.0}), mixed()}) {
    const PhasePath path = reference_path(ts, 1);
    GridFunction x(ts, 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x(i, 0) = path.q(i, 0);
      x(i, 1) = path.p(i, 0);
    }
    const DeltaFunctional f = embed_functional([](double, auto y, auto v) { return y[1] * v[0]; });
    const double action = action_functional(Hamiltonian::from_string("0", 1), path);
    CHECK(f(x) == doctest::Approx(action).epsilon(1e-12));
  }
}

TEST_CASE("running functional") {
  const TimeScale ts = TimeScale::from_points({0.0, 1.0, 3.0});
  const GridFunction x = GridFunction::scalar(ts, [](double t) { return t * t; });
  const DeltaFunctional f = embed_functional([](double, auto, auto v) { return v[0]; });
  const GridFunction r = f.running(x);
  // ∫_0^{σ(t)} x^Δ = x(σ(t)) - x(0).
  CHECK(r(0, 0) == 1.0);
  CHECK(r(1, 0) == 9.0);
  CHECK(std::isnan(r(2, 0)));
  CHECK(f(x) == 9.0);
}
