// Small text helpers: fixed-width real formatting and strict parsing.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

namespace mtlab {

// Reals are serialized with 17 significant digits, enough to round-trip
// any double exactly.
inline std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace text {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    if (pos == std::string_view::npos) {
      parts.push_back(s);
      return parts;
    }
    parts.push_back(s.substr(0, pos));
    s.remove_prefix(pos + 1);
  }
}

inline bool parse_double(std::string_view s, double& out) {
  const std::string buf(trim(s));
  if (buf.empty()) return false;
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size();
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  const std::string buf(trim(s));
  if (buf.empty() || buf[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(buf.c_str(), &end, 10);
  return end == buf.c_str() + buf.size();
}

}  // namespace text
}  // namespace mtlab
