#pragma once

#include <charconv>
#include <string>

namespace wia {

/// Shortest decimal text that round-trips to the same double ("inf" for +inf).
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace wia
