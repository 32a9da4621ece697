#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsh {

/// Raised when a time is not a member of the time scale (or of a restricted
/// domain such as T^kappa).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the grid cannot support a requested stencil or when a
/// quantity is undefined at a junction point.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed interval [lo, hi]; lo == hi encodes an isolated point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool degenerate() const { return lo == hi; }
  bool operator==(const Interval&) const = default;
};

enum class RightKind { dense, scattered };
enum class LeftKind { dense, scattered };

struct PointClass {
  RightKind right = RightKind::dense;
  LeftKind left = LeftKind::dense;

  [[nodiscard]] bool right_scattered() const { return right == RightKind::scattered; }
  [[nodiscard]] bool left_scattered() const { return left == LeftKind::scattered; }
  bool operator==(const PointClass&) const = default;
};

struct JumpRegularity {
  bool sigma_continuous = true;
  bool rho_continuous = true;
};

/// Computational grid: every structural point (segment endpoints and isolated
/// points) plus uniformly spaced interior samples on each dense segment.
struct Grid {
  std::vector<double> points;
  std::vector<std::size_t> segment;  // owning segment index per point
  std::vector<bool> is_sample;       // interior dense sample (not structural)

  struct SegmentRange {
    std::size_t first = 0;  // grid index of lo
    std::size_t last = 0;   // grid index of hi
    double step = 0.0;      // spacing of the samples, 0 for isolated points
  };
  std::vector<SegmentRange> ranges;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  /// True when [points[i], points[i+1]] lies inside one dense segment.
  [[nodiscard]] bool dense_interval(std::size_t i) const {
    return segment[i] == segment[i + 1];
  }
};

class TimeScale;

/// Membership predicates for T^kappa, T_kappa and T^kappa_kappa.
class RestrictedDomains {
 public:
  explicit RestrictedDomains(const TimeScale& ts);

  [[nodiscard]] bool in_upper(double t) const;   // T^kappa = T \ ]rho(b), b]
  [[nodiscard]] bool in_lower(double t) const;   // T_kappa = T \ [a, sigma(a)[
  [[nodiscard]] bool in_both(double t) const;    // T^kappa_kappa

 private:
  std::shared_ptr<const TimeScale> ts_;  // copies share the grid, so this is cheap
  double rho_b_;
  double sigma_a_;
};

/// Bounded time scale modelled as a finite ordered union of disjoint closed
/// intervals. Immutable; copies share the underlying grid.
class TimeScale {
 public:
  /// Minimum number of sub-intervals per dense segment. Even, so Simpson
  /// applies, and large enough for five-point derivative stencils even when
  /// one endpoint has to be excluded.
  static constexpr std::size_t kMinDenseIntervals = 6;

  explicit TimeScale(std::vector<Interval> segments,
                     std::optional<double> dense_step = std::nullopt);

  /// Purely scattered scale made of the given points (sorted on input).
  static TimeScale from_points(std::vector<double> points);
  /// h*Z intersected with [a, b] with b = a + n*h.
  static TimeScale uniform(double a, double h, std::size_t n);
  /// Single continuous interval.
  static TimeScale interval(double a, double b,
                            std::optional<double> dense_step = std::nullopt);

  [[nodiscard]] double min() const { return data_->segments.front().lo; }
  [[nodiscard]] double max() const { return data_->segments.back().hi; }
  [[nodiscard]] std::span<const Interval> segments() const { return data_->segments; }
  [[nodiscard]] double dense_step() const { return data_->dense_step; }
  [[nodiscard]] const Grid& grid() const { return data_->grid; }
  [[nodiscard]] double tolerance() const { return data_->tol; }

  [[nodiscard]] bool contains(double t) const;

  [[nodiscard]] double sigma(double t) const;
  [[nodiscard]] double rho(double t) const;
  [[nodiscard]] double mu(double t) const;
  [[nodiscard]] double nu(double t) const;
  [[nodiscard]] PointClass classify(double t) const;
  [[nodiscard]] JumpRegularity jump_regularity(double t) const;
  [[nodiscard]] RestrictedDomains restricted_domains() const { return RestrictedDomains(*this); }

  /// Points of T^kappa_kappa in RS∩LD or LS∩RD, in increasing order. Empty
  /// means the scale is admissible for the Hamilton solver.
  [[nodiscard]] std::vector<double> admissibility_report() const;
  [[nodiscard]] bool admissible() const { return admissibility_report().empty(); }

  /// Grid index of a member time (snapped within tolerance).
  [[nodiscard]] std::size_t index_of(double t) const;

  /// Identity of the underlying data; grid functions compare scales with it.
  [[nodiscard]] bool same_grid(const TimeScale& other) const { return data_ == other.data_; }

  [[nodiscard]] std::string describe() const;

 private:
  struct Data {
    std::vector<Interval> segments;
    double dense_step = 0.0;
    double tol = 0.0;
    Grid grid;
  };

  // Index of the segment containing t, or throws DomainError.
  [[nodiscard]] std::size_t locate(double t) const;
  [[nodiscard]] bool at_hi(std::size_t seg, double t) const;
  [[nodiscard]] bool at_lo(std::size_t seg, double t) const;

  std::shared_ptr<const Data> data_;
};

/// Parses the time-scale literal used by the CLI, e.g.
/// `union: [0,1]; 1.5; [2,3]; points: 4 5; dense_step: 0.001`.
TimeScale parse_timescale(const std::string& literal);

/// Canonical literal for a scale; parse_timescale(format_timescale(T)) == T.
std::string format_timescale(const TimeScale& ts);

}  // namespace tsh
