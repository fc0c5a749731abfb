#pragma once

#include <stdexcept>
#include <string>

namespace orderest {

// Base class for every error raised by the library. Subclasses mirror the
// failure categories callers branch on (the CLI maps them to exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, nonpositive weights, zero group sizes and the like.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The input is well formed but the requested computation is not defined
// for it (e.g. a restriction component without a nodal parameter).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class InvalidRestriction : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace orderest
