#include "surfelgrad/error.hpp"

namespace surfelgrad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LightAtSurfel: return "LightAtSurfel";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::SamplingFailure: return "SamplingFailure";
    case ErrorCode::InternalError: return "InternalError";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace surfelgrad
