#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hormander {

enum class ErrorCode {
  NonSquare,
  NonFinite,
  OddDimension,
  DimensionMismatch,
  DegenerateForm,
  NotSymplectic,
  IllConditioned,
  InvalidBlocks,
  CSingular,
  IterateDegenerate,
  AsymmetryTooLarge,
  NotTransverse,
  QNotSymmetric,
  AlphaDegenerate,
  UnresolvedCrossing,
  DegenerateEndpoint,
  PathDependence,
  StepFailure,
  EnergyDriftExceeded,
  NoConvergence,
  CriticalPoint,
  NotOnFixedSet,
  DegenerateTransversal,
  UnequalEigenspaces,
  ProjectionIllConditioned,
  MalformedInput,
};

std::string_view to_string(ErrorCode code);

/// Short "%.6g" rendering of a real number for diagnostics.
std::string format_real(double x);

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can report it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hormander
