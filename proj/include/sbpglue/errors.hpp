#pragma once

#include <stdexcept>
#include <string>

namespace sbpglue {

/// Error kinds. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  ConfigParse = 2,
  Io = 3,
  UnsupportedOrder = 10,
  GridTooSmall = 11,
  DataFile = 12,
  InconsistentConstraints = 20,
  NotNested = 21,
  PartitionMismatch = 22,
  NonPositiveJacobian = 30,
  UnknownTransform = 31,
  ShapeMismatch = 40,
  NegativeAlpha = 41,
  NonPositiveSurfaceJacobian = 42,
  UnresolvedFace = 43,
  SingularMass = 50,
  GlueOrderTooLow = 51,
  QuadratureTooCoarse = 52,
  NonFiniteState = 60,
  SystemTooLarge = 61,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sbpglue
