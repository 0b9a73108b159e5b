#pragma once

#include <stdexcept>
#include <string>

namespace cubeforge {

enum class ErrorKind {
  SymmetryViolation,
  ZeroDistance,
  NegativeDistance,
  BadSpec,
  ModeViolation,
  DegenerateWindow,
  NoParent,
  TightAmbiguity,
  NoNearChild,
  NotAChild,
  PreconditionFail,
  ConfigError,
  BuildError,
  IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cubeforge
