#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vtraj {

/// Malformed input row. Carries the 1-based line number it came from.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), m_line{line} {}

  std::size_t line() const noexcept { return m_line; }

private:
  std::size_t m_line;
};

/// Data-dependent failure (empty field, mismatched grids, truncated trajectory, ...).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace vtraj
