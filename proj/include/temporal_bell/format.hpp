#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace temporal_bell {

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, 16);
  return std::string(buf, res.ptr);
}

inline std::uint64_t from_hex(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("from_hex: bad hex string '" + s + "'");
  }
  return v;
}

/// Shortest round-trip decimal rendering, identical wherever a double is
/// printed (JSON and CSV cells share this), so equal values compare as equal
/// strings.
inline std::string format_double(double v) { return nlohmann::json(v).dump(); }

}  // namespace temporal_bell
