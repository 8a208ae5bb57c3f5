#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfelgrad {

enum class ErrorCode {
  InvalidParam,
  DegenerateFrame,
  OutOfBounds,
  NonPositiveDepth,
  ResolutionMismatch,
  ShapeMismatch,
  LightAtSurfel,
  NonFiniteOutput,
  EmptySet,
  EmptyMask,
  PlacementFailure,
  SamplingFailure,
  InternalError,
  Diverged,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace surfelgrad
