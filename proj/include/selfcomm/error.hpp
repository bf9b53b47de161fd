#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selfcomm {

enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  ClusterAmbiguity,
  DimensionMismatch,
  AxiomViolation,
  NotTraceless,
  ProjectionIncompatible,
  InternalInvariantBroken,
  ShiftTooSmall,
  MismatchedProvenance,
  EmptyInput,
  InvalidTuple,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Short form of a double for messages.
inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selfcomm
