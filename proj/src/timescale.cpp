#include "tsh/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsh {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt_segment(const Interval& s) {
  if (s.degenerate()) return "{" + fmt(s.lo) + "}";
  return "[" + fmt(s.lo) + ", " + fmt(s.hi) + "]";
}

}  // namespace

TimeScale::TimeScale(std::vector<Interval> segments, std::optional<double> dense_step) {
  if (segments.empty()) throw std::invalid_argument("time scale needs at least one segment");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi))
      throw std::invalid_argument("time scale segment " + std::to_string(i) + " is not finite");
    if (s.lo > s.hi)
      throw std::invalid_argument("time scale segment " + fmt_segment(s) + " has lo > hi");
    if (i > 0 && !(segments[i - 1].hi < s.lo))
      throw std::invalid_argument("time scale segments " + fmt_segment(segments[i - 1]) + " and " +
                                  fmt_segment(s) + " are not disjoint and sorted");
  }

  auto data = std::make_shared<Data>();
  data->segments = std::move(segments);
  const double a = data->segments.front().lo;
  const double b = data->segments.back().hi;
  data->dense_step = dense_step.value_or((b - a) / 1000.0);
  if (!(data->dense_step > 0.0) || !std::isfinite(data->dense_step))
    throw std::invalid_argument("dense_step must be positive, got " + fmt(data->dense_step));
  data->tol = 1e-12 * (b - a);

  Grid& g = data->grid;
  for (std::size_t s = 0; s < data->segments.size(); ++s) {
    const Interval& seg = data->segments[s];
    Grid::SegmentRange range;
    range.first = g.points.size();
    g.points.push_back(seg.lo);
    g.segment.push_back(s);
    g.is_sample.push_back(false);
    if (!seg.degenerate()) {
      const double len = seg.hi - seg.lo;
      auto n = static_cast<std::size_t>(std::ceil(len / data->dense_step - 1e-9));
      n = std::max(n, kMinDenseIntervals);
      if (n % 2 == 1) ++n;
      range.step = len / static_cast<double>(n);
      for (std::size_t k = 1; k < n; ++k) {
        g.points.push_back(seg.lo + len * (static_cast<double>(k) / static_cast<double>(n)));
        g.segment.push_back(s);
        g.is_sample.push_back(true);
      }
      g.points.push_back(seg.hi);
      g.segment.push_back(s);
      g.is_sample.push_back(false);
    }
    range.last = g.points.size() - 1;
    g.ranges.push_back(range);
  }
  if (g.points.size() < 3)
    throw std::invalid_argument("time scale must contain at least 3 points, got " +
                                std::to_string(g.points.size()));
  data_ = std::move(data);
}

TimeScale TimeScale::from_points(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Interval> segs;
  segs.reserve(points.size());
  for (double p : points) segs.push_back({p, p});
  return TimeScale(std::move(segs));
}

TimeScale TimeScale::uniform(double a, double h, std::size_t n) {
  if (!(h > 0.0)) throw std::invalid_argument("uniform time scale needs h > 0");
  std::vector<double> pts;
  pts.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pts.push_back(a + static_cast<double>(k) * h);
  return from_points(std::move(pts));
}

TimeScale TimeScale::interval(double a, double b, std::optional<double> dense_step) {
  return TimeScale({{a, b}}, dense_step);
}

std::size_t TimeScale::locate(double t) const {
  const auto& segs = data_->segments;
  const double tol = data_->tol;
  auto it = std::upper_bound(segs.begin(), segs.end(), t + tol,
                             [](double v, const Interval& s) { return v < s.lo; });
  if (it != segs.begin()) {
    const auto idx = static_cast<std::size_t>(std::distance(segs.begin(), it) - 1);
    if (t <= segs[idx].hi + tol) return idx;
  }
  // Outside every segment: report the nearest one.
  std::size_t nearest = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double d = t < segs[i].lo ? segs[i].lo - t : t - segs[i].hi;
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  throw DomainError("t = " + fmt(t) + " is not in the time scale; nearest segment is " +
                    fmt_segment(segs[nearest]) + " at distance " + fmt(best));
}

bool TimeScale::at_hi(std::size_t seg, double t) const {
  return std::abs(t - data_->segments[seg].hi) <= data_->tol;
}

bool TimeScale::at_lo(std::size_t seg, double t) const {
  return std::abs(t - data_->segments[seg].lo) <= data_->tol;
}

bool TimeScale::contains(double t) const {
  try {
    (void)locate(t);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

double TimeScale::sigma(double t) const {
  const std::size_t s = locate(t);
  if (!at_hi(s, t)) return t;
  const auto& segs = data_->segments;
  return s + 1 < segs.size() ? segs[s + 1].lo : segs[s].hi;
}

double TimeScale::rho(double t) const {
  const std::size_t s = locate(t);
  if (!at_lo(s, t)) return t;
  const auto& segs = data_->segments;
  return s > 0 ? segs[s - 1].hi : segs[s].lo;
}

double TimeScale::mu(double t) const {
  const double s = sigma(t);
  return s > t ? s - t : 0.0;
}

double TimeScale::nu(double t) const {
  const double r = rho(t);
  return r < t ? t - r : 0.0;
}

PointClass TimeScale::classify(double t) const {
  PointClass c;
  c.right = sigma(t) > t ? RightKind::scattered : RightKind::dense;
  c.left = rho(t) < t ? LeftKind::scattered : LeftKind::dense;
  return c;
}

JumpRegularity TimeScale::jump_regularity(double t) const {
  const PointClass c = classify(t);
  JumpRegularity j;
  j.sigma_continuous = !(c.right_scattered() && !c.left_scattered());
  j.rho_continuous = !(c.left_scattered() && !c.right_scattered());
  return j;
}

std::vector<double> TimeScale::admissibility_report() const {
  std::vector<double> out;
  const RestrictedDomains dom(*this);
  for (const Interval& seg : data_->segments) {
    for (double t : {seg.lo, seg.hi}) {
      if (!dom.in_both(t)) continue;
      const JumpRegularity j = jump_regularity(t);
      if ((!j.sigma_continuous || !j.rho_continuous) && (out.empty() || out.back() != t))
        out.push_back(t);
    }
  }
  return out;
}

std::size_t TimeScale::index_of(double t) const {
  const auto& pts = data_->grid.points;
  auto it = std::lower_bound(pts.begin(), pts.end(), t);
  std::size_t best = pts.size();
  double dist = INFINITY;
  for (auto cand : {it, it == pts.begin() ? it : std::prev(it)}) {
    if (cand == pts.end()) continue;
    const double d = std::abs(*cand - t);
    if (d < dist) {
      dist = d;
      best = static_cast<std::size_t>(std::distance(pts.begin(), cand));
    }
  }
  if (best == pts.size() || dist > data_->tol) {
    (void)locate(t);  // throws with the nearest segment if t is outside T
    throw DomainError("t = " + fmt(t) + " is in the time scale but not a grid point");
  }
  return best;
}

std::string TimeScale::describe() const { return format_timescale(*this); }

RestrictedDomains::RestrictedDomains(const TimeScale& ts)
    : ts_(std::make_shared<const TimeScale>(ts)), rho_b_(ts.rho(ts.max())), sigma_a_(ts.sigma(ts.min())) {}

bool RestrictedDomains::in_upper(double t) const {
  return ts_->contains(t) && !(t > rho_b_ + ts_->tolerance());
}

bool RestrictedDomains::in_lower(double t) const {
  return ts_->contains(t) && !(t < sigma_a_ - ts_->tolerance());
}

bool RestrictedDomains::in_both(double t) const { return in_upper(t) && in_lower(t); }

}  // namespace tsh
