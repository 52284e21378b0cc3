#include "svgr/error.h"

namespace svgr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonSvgRoot: return "NonSvgRoot";
    case ErrorCode::kRenderError: return "RenderError";
    case ErrorCode::kMalformedPathData: return "MalformedPathData";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kComponentOutOfRange: return "ComponentOutOfRange";
    case ErrorCode::kScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::kDegenerateGroup: return "DegenerateGroup";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInputError: return "InputError";
  }
  return "Unknown";
}

}  // namespace svgr
