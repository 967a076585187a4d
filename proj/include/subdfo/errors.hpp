#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace subdfo {

enum class ErrorKind {
  NonFinite,
  NotOrthonormal,
  DimensionMismatch,
  NotSquare,
  EmptySet,
  DuplicateConflict,
  NotInSubspace,
  NotPoised,
  Infeasible,
  VariantPreconditionViolated,
  ReferenceMismatch,
  SpecInfeasible,
  UnknownTheorem,
  InvalidArgument,
  MalformedInput,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `residual()` is set for Infeasible
/// and NotPoised so callers can report how far the data is from consistent.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        double residual = std::numeric_limits<double>::quiet_NaN());

  ErrorKind kind() const noexcept { return kind_; }
  double residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  double residual_;
};

}  // namespace subdfo
