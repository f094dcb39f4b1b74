#include "dvpp/errors.hpp"

namespace dvpp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoleAtQueryPoint: return "PoleAtQueryPoint";
    case ErrorKind::InverseOfZero: return "InverseOfZero";
    case ErrorKind::ImproperTransferFunction: return "ImproperTransferFunction";
    case ErrorKind::UnstableDiscretization: return "UnstableDiscretization";
    case ErrorKind::DegreeCapExceeded: return "DegreeCapExceeded";
    case ErrorKind::NonPositiveDroop: return "NonPositiveDroop";
    case ErrorKind::InvalidGain: return "InvalidGain";
    case ErrorKind::InvalidBandSplit: return "InvalidBandSplit";
    case ErrorKind::OverSubscribed: return "OverSubscribed";
    case ErrorKind::MissingFactor: return "MissingFactor";
    case ErrorKind::ImproperAfterAugmentation: return "ImproperAfterAugmentation";
    case ErrorKind::UnrealizedDevice: return "UnrealizedDevice";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::SingularInteriorBlock: return "SingularInteriorBlock";
    case ErrorKind::ImproperDevice: return "ImproperDevice";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateSum: return "DegenerateSum";
    case ErrorKind::AlgebraicLoopUnstable: return "AlgebraicLoopUnstable";
    case ErrorKind::ZeroWeightSum: return "ZeroWeightSum";
    case ErrorKind::AllCapacitiesZero: return "AllCapacitiesZero";
    case ErrorKind::CapacityExceedsRating: return "CapacityExceedsRating";
    case ErrorKind::UnknownDevice: return "UnknownDevice";
    case ErrorKind::ZeroImpedance: return "ZeroImpedance";
    case ErrorKind::HeterogeneousRatioWithStrictMode: return "HeterogeneousRatioWithStrictMode";
    case ErrorKind::NoFormingDevice: return "NoFormingDevice";
    case ErrorKind::MissingChannel: return "MissingChannel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace dvpp
