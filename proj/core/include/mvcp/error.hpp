#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvcp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (rank, mode, fraction, ...) was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A factor matrix lacks full column rank where a pseudo-inverse is needed.
class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, std::string mode)
      : Error(what), mode_(std::move(mode)) {}

  const std::string& mode() const noexcept { return mode_; }

 private:
  std::string mode_;
};

}  // namespace mvcp
