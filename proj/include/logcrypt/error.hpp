#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logcrypt {

/// Raised when a caller hands an operation data that violates its contract
/// (unbound variables, out-of-range indices, malformed keys).
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by the text readers. `line()` is 1-based; 0 means end of input.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

} // namespace logcrypt
