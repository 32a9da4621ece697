#include <doctest.h>

#include <cmath>

#include "tsh/field.hpp"

using namespace tsh;

TEST_CASE("evaluate expression-backed field") {
  const VectorField x = VectorField::from_strings({"p1", "p2"}, {"-q1-q2", "-q2-q1"});
  CHECK(x.dim() == 2);
  CHECK(x.analytic());
  Vec q(2), p(2), xq, xp;
  q << 1.0, 2.0;
  p << -0.5, 0.25;
  x.evaluate(q, p, xq, xp);
  CHECK(xq(0) == -0.5);
  CHECK(xq(1) == 0.25);
  CHECK(xp(0) == -3.0);
  CHECK(xp(1) == -3.0);
}

TEST_CASE("field construction errors") {
  CHECK_THROWS(VectorField::from_strings({"p1"}, {"-q1", "0"}));
  CHECK_THROWS(VectorField::from_strings({"p2"}, {"-q1"}));
  CHECK_THROWS(VectorField::from_strings({}, {}));
}

TEST_CASE("analytic Jacobian matches central differences") {
  const VectorField x = VectorField::from_strings({"p1*cos(q2)", "exp(q1)*p2"}, {"-sin(q1)*p2", "q1^2-p1*q2"});
  Vec q(2), p(2);
  q << 0.3, -0.6;
  p << 0.8, 0.1;
  const JacobianBlocks a = x.jacobian(q, p);
  const JacobianBlocks f = x.jacobian_fd(q, p);
  CHECK((a.qq - f.qq).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((a.qp - f.qp).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((a.pq - f.pq).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((a.pp - f.pp).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(a.qp(0, 0) == std::cos(-0.6));
  CHECK(a.pp(1, 0) == 0.6);
}

TEST_CASE("callable fields fall back to central differences") {
  const VectorField x = VectorField::from_callable(1, [](auto q, auto p, auto xq, auto xp) {
    xq[0] = p[0] * p[0];
    xp[0] = -std::sin(q[0]);
  });
  CHECK_FALSE(x.analytic());
  Vec q(1), p(1);
  q << 0.4;
  p << -0.3;
  const JacobianBlocks j = x.jacobian(q, p);
  CHECK(j.qp(0, 0) == doctest::Approx(-0.6).epsilon(1e-8));
  CHECK(j.pq(0, 0) == doctest::Approx(-std::cos(0.4)).epsilon(1e-8));
  CHECK(std::abs(j.qq(0, 0)) <= 1e-12);
}

TEST_CASE("non-finite components raise") {
  const VectorField x = VectorField::from_strings({"log(q1)"}, {"0"});
  Vec q(1), p(1), xq, xp;
  q << -1.0;
  p << 0.0;
  CHECK_THROWS_AS(x.evaluate(q, p, xq, xp), expr::EvalError);
}

TEST_CASE("linear combination") {
  const VectorField a = VectorField::from_strings({"p1"}, {"-q1"});
  const VectorField b = VectorField::from_strings({"q1"}, {"p1"});
  const VectorField c = linear_combination(2.0, a, -1.0, b);
  CHECK(c.analytic());
  Vec q(1), p(1), xq, xp;
  q << 0.5;
  p << 0.25;
  c.evaluate(q, p, xq, xp);
  CHECK(xq(0) == 0.0);
  CHECK(xp(0) == -1.25);
}

TEST_CASE("Hamiltonian gradient, mixed block and field") {
  const Hamiltonian h = Hamiltonian::from_string("p1^2/2 + 1 - cos(q1) + q1*p1", 1);
  const std::vector<double> q{0.7}, p{-0.2};
  std::vector<double> hq(1), hp(1);
  h.gradient(q, p, hq, hp);
  CHECK(hq[0] == doctest::Approx(std::sin(0.7) - 0.2).epsilon(1e-15));
  CHECK(hp[0] == doctest::Approx(-0.2 + 0.7).epsilon(1e-15));
  CHECK(h.mixed_qp(q, p)(0, 0) == 1.0);
  const VectorField x = h.field();
  Vec qv(1), pv(1), xq, xp;
  qv << 0.7;
  pv << -0.2;
  x.evaluate(qv, pv, xq, xp);
  CHECK(xq(0) == doctest::Approx(hp[0]));
  CHECK(xp(0) == doctest::Approx(-hq[0]));
}

TEST_CASE("callable Hamiltonian gradient by differences") {
  const Hamiltonian h = Hamiltonian::from_callable(2, [](auto q, auto p) {
    return 0.5 * (q[0] * q[0] + q[1] * q[1] + p[0] * p[0] + p[1] * p[1]) + q[0] * q[1];
  });
  const std::vector<double> q{0.5, -1.0}, p{0.25, 2.0};
  std::vector<double> hq(2), hp(2);
  h.gradient(q, p, hq, hp);
  CHECK(hq[0] == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(hq[1] == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(hp[1] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(h.mixed_qp(q, p).cwiseAbs().maxCoeff() <= 1e-6);
}
