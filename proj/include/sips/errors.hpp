#pragma once

#include <stdexcept>
#include <string>

namespace sips {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON, CSV, init strings).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? "parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what
                       : "parse error: " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A model assumption (H1..H6, C1..C5, Omega membership) does not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Iterative method ran out of budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration decayed to the origin: no positive equilibrium.
class CollapseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sips
