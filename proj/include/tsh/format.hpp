#pragma once

#include <charconv>
#include <string>

namespace tsh {

// Shortest representation that round-trips; locale independent.
inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace tsh
