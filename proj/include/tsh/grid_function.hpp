#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsh/timescale.hpp"

namespace tsh {

/// Vector-valued function sampled on the grid of a time scale. Values are
/// stored point-major: component c of point i lives at i*dim + c.
class GridFunction {
 public:
  GridFunction(TimeScale ts, std::size_t dim);
  GridFunction(TimeScale ts, std::size_t dim, std::vector<double> values);

  using Sampler = std::function<void(double t, std::span<double> out)>;
  static GridFunction sample(const TimeScale& ts, std::size_t dim, const Sampler& f);
  static GridFunction scalar(const TimeScale& ts, const std::function<double(double)>& f);
  static GridFunction constant(const TimeScale& ts, std::span<const double> value);

  [[nodiscard]] const TimeScale& scale() const { return ts_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return ts_.grid().size(); }
  [[nodiscard]] double time(std::size_t i) const { return ts_.grid().points[i]; }

  [[nodiscard]] std::span<const double> at(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::span<double> at(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t c) const { return values_[i * dim_ + c]; }
  double& operator()(std::size_t i, std::size_t c) { return values_[i * dim_ + c]; }

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<double> values() { return values_; }

  /// Single component as a scalar grid function.
  [[nodiscard]] GridFunction component(std::size_t c) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);

  /// Throws std::invalid_argument unless both live on the same grid with the
  /// same dimension.
  void require_compatible(const GridFunction& o, const char* what) const;

 private:
  TimeScale ts_;
  std::size_t dim_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

/// Pointwise Euclidean inner product <f(t), g(t)> as a scalar grid function.
GridFunction pointwise_dot(const GridFunction& f, const GridFunction& g);

/// Max over grid points and components of |f|.
double sup_norm(const GridFunction& f);

}  // namespace tsh
