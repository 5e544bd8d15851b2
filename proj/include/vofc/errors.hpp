/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every vofc module.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace vofc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t <= a, x <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A variable order leaves its declared bounds, or a theorem hypothesis fails.
class ValidityError : public Error {
 public:
  using Error::Error;
};

/// Missing ingredient for an operation (e.g. no derivative and fallback disabled).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Caller-side precondition violated (e.g. a variation that does not vanish on the boundary).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The optimizer produced a non-finite functional value.
class OptimizerError : public Error {
 public:
  using Error::Error;
};

/// Expression or configuration text could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace vofc
