#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "tsh/timescale.hpp"

namespace tsh {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& text, const std::string& context) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last)
    throw std::invalid_argument("time scale literal: expected a real number in " + context +
                                ", got '" + s + "'");
  return v;
}

bool starts_with_key(const std::string& s, std::string_view key, std::string& rest) {
  if (s.rfind(key, 0) != 0) return false;
  std::string tail = trim(std::string_view(s).substr(key.size()));
  if (tail.empty() || tail.front() != ':') return false;
  rest = trim(std::string_view(tail).substr(1));
  return true;
}

Interval parse_item(const std::string& item) {
  if (!item.empty() && item.front() == '[') {
    if (item.back() != ']')
      throw std::invalid_argument("time scale literal: unterminated interval '" + item + "'");
    const std::string body = item.substr(1, item.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
      throw std::invalid_argument("time scale literal: interval needs exactly two bounds in '" +
                                  item + "'");
    return {parse_real(body.substr(0, comma), item), parse_real(body.substr(comma + 1), item)};
  }
  const double p = parse_real(item, "point");
  return {p, p};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

TimeScale parse_timescale(const std::string& literal) {
  std::vector<Interval> items;
  std::optional<double> dense_step;
  enum class Mode { none, union_items } mode = Mode::none;

  std::stringstream ss(literal);
  std::string piece;
  while (std::getline(ss, piece, ';')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    std::string rest;
    if (starts_with_key(piece, "union", rest)) {
      mode = Mode::union_items;
      if (!rest.empty()) items.push_back(parse_item(rest));
    } else if (starts_with_key(piece, "points", rest)) {
      std::istringstream ps(rest);
      std::string tok;
      while (ps >> tok) items.push_back(parse_item(tok));
      mode = Mode::none;
    } else if (starts_with_key(piece, "dense_step", rest)) {
      dense_step = parse_real(rest, "dense_step");
      mode = Mode::none;
    } else if (mode == Mode::union_items) {
      items.push_back(parse_item(piece));
    } else {
      throw std::invalid_argument("time scale literal: unexpected clause '" + piece +
                                  "' (expected union:, points: or dense_step:)");
    }
  }
  if (items.empty()) throw std::invalid_argument("time scale literal: no intervals or points");

  // Items may be given in any order; they are sorted but must not overlap.
  std::sort(items.begin(), items.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  return TimeScale(std::move(items), dense_step);
}

std::string format_timescale(const TimeScale& ts) {
  std::string out = "union: ";
  bool first = true;
  for (const Interval& s : ts.segments()) {
    if (!first) out += "; ";
    first = false;
    out += s.degenerate() ? fmt(s.lo) : "[" + fmt(s.lo) + "," + fmt(s.hi) + "]";
  }
  out += "; dense_step: " + fmt(ts.dense_step());
  return out;
}

}  // namespace tsh
