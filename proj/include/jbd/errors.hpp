#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jbd {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Input file declares a format or field this library does not handle.
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

/// Records or rows do not conform to the expected column schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A precondition on caller-supplied data was violated.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions are incompatible.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Matrix failed a full-column-rank check; carries the 0-based column index.
class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& msg, int column)
      : Error(msg + " (column " + std::to_string(column) + ", 0-based)"), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

/// A matrix required to be invertible is numerically singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a capability the chosen mode does not provide.
class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

/// Not enough recorded steps to evaluate the requested analysis.
class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver ran out of iterations; carries the best iterate found.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> best_x, double residual_norm,
                   int iterations)
      : Error(msg), best_x_(std::move(best_x)), residual_norm_(residual_norm),
        iterations_(iterations) {}
  const std::vector<double>& best_x() const { return best_x_; }
  double residual_norm() const { return residual_norm_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<double> best_x_;
  double residual_norm_;
  int iterations_;
};

}  // namespace jbd
