#include "pcma/errors.hpp"

namespace pcma {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EvenResolution: return "EvenResolution";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotPSH: return "NotPSH";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::MollifierTooWide: return "MollifierTooWide";
    case ErrorCode::RadiiOutOfRange: return "RadiiOutOfRange";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::AIsZero: return "AIsZero";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::GramNotPD: return "GramNotPD";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace pcma
