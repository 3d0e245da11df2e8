#pragma once

#include <stdexcept>
#include <string>

namespace scgfd {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed graph text. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string &what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A vertex name or micro vertex that is not part of the graph at hand.
class UnknownVertexError : public Error {
 public:
  using Error::Error;
};

// An argument violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Raised while evaluating an estimand: zero-mass conditioning event or missing variable.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace scgfd
