#pragma once

#include <charconv>
#include <string>

namespace cavroute {

/// Shortest round-trip decimal form, locale independent (std::to_chars).
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed-precision form for plot coordinates.
inline std::string fmt_fixed(double v, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

}  // namespace cavroute
