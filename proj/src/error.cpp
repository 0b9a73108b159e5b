#include "cubeforge/error.hpp"

namespace cubeforge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::ZeroDistance: return "ZeroDistance";
    case ErrorKind::NegativeDistance: return "NegativeDistance";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::ModeViolation: return "ModeViolation";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::NoParent: return "NoParent";
    case ErrorKind::TightAmbiguity: return "TightAmbiguity";
    case ErrorKind::NoNearChild: return "NoNearChild";
    case ErrorKind::NotAChild: return "NotAChild";
    case ErrorKind::PreconditionFail: return "PreconditionFail";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::BuildError: return "BuildError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cubeforge
