#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace vtraj {

/// Appends the shortest decimal text that parses back to exactly `value`.
/// Non-finite values are written as `nan`, `inf`, `-inf`.
inline void append_number(std::string& out, double value) {
  if (std::isnan(value)) {
    out += "nan";
    return;
  }
  if (std::isinf(value)) {
    out += value > 0 ? "inf" : "-inf";
    return;
  }
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, end);
}

inline std::string format_number(double value) {
  std::string s;
  append_number(s, value);
  return s;
}

/// Fixed-point with `digits` decimals, for human-facing tables.
inline std::string format_fixed(double value, int digits) {
  if (!std::isfinite(value)) return format_number(value);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  return std::string(buf, end);
}

/// Strict full-string parse; returns false on any trailing garbage.
inline bool parse_number(std::string_view text, double& value) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return false;
  if (text == "nan" || text == "NaN") {
    value = std::nan("");
    return true;
  }
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace vtraj
