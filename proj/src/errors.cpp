#include "subdfo/errors.hpp"

namespace subdfo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::DuplicateConflict: return "DuplicateConflict";
    case ErrorKind::NotInSubspace: return "NotInSubspace";
    case ErrorKind::NotPoised: return "NotPoised";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::VariantPreconditionViolated: return "VariantPreconditionViolated";
    case ErrorKind::ReferenceMismatch: return "ReferenceMismatch";
    case ErrorKind::SpecInfeasible: return "SpecInfeasible";
    case ErrorKind::UnknownTheorem: return "UnknownTheorem";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double residual)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      residual_(residual) {}

}  // namespace subdfo
