#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svgr {

enum class ErrorCode {
  kParseError,
  kNonSvgRoot,
  kRenderError,
  kMalformedPathData,
  kDimensionMismatch,
  kZeroVector,
  kComponentOutOfRange,
  kScorerUnavailable,
  kDegenerateGroup,
  kLengthMismatch,
  kEmptySequence,
  kEmptyInput,
  kNumericalFailure,
  kInvalidArgument,
  kInputError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace svgr
