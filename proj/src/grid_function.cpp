#include "tsh/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsh {

GridFunction::GridFunction(TimeScale ts, std::size_t dim)
    : ts_(std::move(ts)), dim_(dim), values_(ts_.grid().size() * dim, 0.0) {
  if (dim_ == 0) throw std::invalid_argument("grid function dimension must be >= 1");
}

GridFunction::GridFunction(TimeScale ts, std::size_t dim, std::vector<double> values)
    : ts_(std::move(ts)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw std::invalid_argument("grid function dimension must be >= 1");
  if (values_.size() != ts_.grid().size() * dim_)
    throw std::invalid_argument("grid function has " + std::to_string(values_.size()) +
                                " values, expected " + std::to_string(ts_.grid().size() * dim_));
}

GridFunction GridFunction::sample(const TimeScale& ts, std::size_t dim, const Sampler& f) {
  GridFunction out(ts, dim);
  for (std::size_t i = 0; i < out.size(); ++i) f(out.time(i), out.at(i));
  return out;
}

GridFunction GridFunction::scalar(const TimeScale& ts, const std::function<double(double)>& f) {
  return sample(ts, 1, [&](double t, std::span<double> out) { out[0] = f(t); });
}

GridFunction GridFunction::constant(const TimeScale& ts, std::span<const double> value) {
  return sample(ts, value.size(),
                [&](double, std::span<double> out) { std::copy(value.begin(), value.end(), out.begin()); });
}

GridFunction GridFunction::component(std::size_t c) const {
  GridFunction out(ts_, 1);
  for (std::size_t i = 0; i < size(); ++i) out(i, 0) = (*this)(i, c);
  return out;
}

void GridFunction::require_compatible(const GridFunction& o, const char* what) const {
  if (!ts_.same_grid(o.ts_))
    throw std::invalid_argument(std::string(what) + ": grid functions live on different grids");
  if (dim_ != o.dim_)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(dim_) + " vs " + std::to_string(o.dim_) + ")");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_compatible(o, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_compatible(o, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

GridFunction pointwise_dot(const GridFunction& f, const GridFunction& g) {
  f.require_compatible(g, "pointwise_dot");
  GridFunction out(f.scale(), 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < f.dim(); ++c) s += f(i, c) * g(i, c);
    out(i, 0) = s;
  }
  return out;
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace tsh
