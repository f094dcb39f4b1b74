#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dvpp {

enum class ErrorKind {
  PoleAtQueryPoint,
  InverseOfZero,
  ImproperTransferFunction,
  UnstableDiscretization,
  DegreeCapExceeded,
  NonPositiveDroop,
  InvalidGain,
  InvalidBandSplit,
  OverSubscribed,
  MissingFactor,
  ImproperAfterAugmentation,
  UnrealizedDevice,
  DisconnectedGraph,
  SingularInteriorBlock,
  ImproperDevice,
  DimensionMismatch,
  DegenerateSum,
  AlgebraicLoopUnstable,
  ZeroWeightSum,
  AllCapacitiesZero,
  CapacityExceedsRating,
  UnknownDevice,
  ZeroImpedance,
  HeterogeneousRatioWithStrictMode,
  NoFormingDevice,
  MissingChannel,
  ParseError,
  SemanticError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dvpp
