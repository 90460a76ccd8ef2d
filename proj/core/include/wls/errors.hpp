#pragma once

#include <stdexcept>
#include <string>

namespace wls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (contract violation), or a file declares a
/// different number of values than it holds.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Thin QR found a diagonal entry of R below the rank tolerance.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Triangular system with a zero diagonal entry.
class Singular : public Error {
 public:
  using Error::Error;
};

/// The 2r x 2r capacitance matrix I + Y^T Z is singular or numerically so.
/// For the updated least squares problem this means A + UV^T has lost rank.
class SingularCapacitance : public Error {
 public:
  SingularCapacitance(const std::string& what, double rcond)
      : Error(what), rcond_(rcond) {}

  /// Reciprocal condition estimate at the time of failure (0 if a pivot
  /// vanished outright).
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Iterative solver missed its tolerance within the iteration budget.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, long column, long iterations,
                     double relative_residual)
      : Error(what),
        column_(column),
        iterations_(iterations),
        relative_residual_(relative_residual) {}

  long column() const noexcept { return column_; }
  long iterations() const noexcept { return iterations_; }
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  long column_;
  long iterations_;
  double relative_residual_;
};

class MalformedHeader : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wls
