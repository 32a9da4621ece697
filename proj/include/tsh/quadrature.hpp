#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/random/sobol.hpp>

namespace tsh {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; exact for polynomials of
/// degree <= 2n - 1. Nodes ascending.
QuadratureRule gauss_legendre_unit(std::size_t n);

/// Sobol sequence with a seeded Cranley-Patterson rotation, in [0, 1)^dim.
/// The all-zero first point is skipped.
class ShiftedSobol {
 public:
  ShiftedSobol(std::size_t dim, std::uint64_t seed);
  [[nodiscard]] std::vector<double> next();
  [[nodiscard]] std::size_t dim() const { return shift_.size(); }

 private:
  boost::random::sobol engine_;
  std::vector<double> shift_;
};

}  // namespace tsh
