#include "tsh/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace tsh {

QuadratureRule gauss_legendre_unit(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  const int order = static_cast<int>(n);
  // Nonnegative roots of P_n, ascending.
  const std::vector<double> roots = boost::math::legendre_p_zeros<double>(order);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Fill from the middle outwards; roots[0] is 0 when n is odd.
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double x = roots[i];
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // half the [-1, 1] weight
    const std::size_t up = half + i;
    const std::size_t down = n % 2 == 1 ? half - i : half - 1 - i;
    rule.nodes[up] = 0.5 * (1.0 + x);
    rule.weights[up] = w;
    rule.nodes[down] = 0.5 * (1.0 - x);
    rule.weights[down] = w;
  }
  return rule;
}

ShiftedSobol::ShiftedSobol(std::size_t dim, std::uint64_t seed) : engine_(dim == 0 ? 1 : dim) {
  if (dim == 0) throw std::invalid_argument("ShiftedSobol needs at least one dimension");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  shift_.resize(dim);
  for (double& s : shift_) s = u(gen);
  engine_.discard(dim);
}

std::vector<double> ShiftedSobol::next() {
  std::vector<double> x(shift_.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = std::ldexp(static_cast<double>(engine_()), -64) + shift_[j];
    x[j] = v - std::floor(v);
  }
  return x;
}

}  // namespace tsh
