#pragma once

#include <stdexcept>
#include <string>

namespace mbq {

enum class ErrorCode {
  InvalidArgument,
  NotPositiveDefinite,
  NoConvergence,
  OrderOutOfRange,
  GridTooLarge,
  InvalidCorrelation,
  NonIncreasingTimes,
  AllZeroWeights,
  Schema,
  Io,
  UnknownPreset,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; the C API maps
// the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mbq
