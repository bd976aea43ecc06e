#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcherry {

// Base for everything the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (bad index,
// empty subset, k out of range, state out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A junction tree operation would break the t-cherry structure.
class StructureError : public Error {
 public:
  using Error::Error;
};

// Count data that sums to zero.
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

// Dense state space or search space larger than the configured guard.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Something that cannot happen for marginals of a single distribution.
class InternalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace tcherry
