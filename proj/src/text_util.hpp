#ifndef DICTMON_TEXT_UTIL_HPP
#define DICTMON_TEXT_UTIL_HPP

// Small parsing/formatting helpers shared by the readers and writers.

#include "dictmon/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dictmon::detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n'))
    ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n'))
    --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline double parse_double(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  std::string_view v = t;
  if (!v.empty() && v.front() == '+')
    v.remove_prefix(1);
  if (v == "inf" || v == "Infinity")
    return HUGE_VAL;
  if (v == "-inf" || v == "-Infinity")
    return -HUGE_VAL;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ParseError(where + ": malformed number '" + t + "'");
  return value;
}

inline std::int64_t parse_int(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError(where + ": malformed integer '" + t + "'");
  return value;
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

} // namespace dictmon::detail

#endif
