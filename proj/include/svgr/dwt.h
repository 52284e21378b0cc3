#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace svgr {

// The six Drawing-with-Thought reasoning stages, in canonical order.
enum class StageKind {
  kConceptSketching,
  kCanvasPlanning,
  kShapeDecomposition,
  kCoordinateCalculation,
  kStylingColoring,
  kFinalAssembly,
};

inline constexpr std::size_t kStageCount = 6;

std::string_view stage_name(StageKind kind);

enum class SplitIssue { kUnterminatedThinkBlock };

// A model response cut into its reasoning block, its first complete <svg>
// element and everything else.
struct ResponseParts {
  std::optional<std::string> think_text;  // between <think> and </think>
  std::optional<std::string> svg_text;    // "<svg" ... "</svg>"
  std::string trailing_text;
  std::optional<SplitIssue> issue;

  bool has_think_block() const { return think_text.has_value(); }
};

// Half-open byte range into the think text.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const TextSpan&) const = default;
};

struct DwtTrace {
  std::array<std::optional<TextSpan>, kStageCount> stages;
  // Present stages appear in canonical order (vacuously true for <= 1).
  bool ordered = true;
  int stage_count = 0;

  bool present(StageKind kind) const { return stages[static_cast<std::size_t>(kind)].has_value(); }
};

enum class ThinkRewardMode { kBinary, kPartial };

struct ThinkRewardConfig {
  ThinkRewardMode mode = ThinkRewardMode::kBinary;
  bool require_order = true;
};

// Takes the first <think>...</think> block, then the first complete <svg>
// element after it (or anywhere when there is no think block). An opening
// <think> with no closing tag sets `issue`, and then neither part is
// extracted. Bytes not in a part or a delimiter go to trailing_text in
// their original order.
ResponseParts split_response(std::string_view text);

// Finds stage headings: a line that begins (after markdown decoration and
// an optional "a)", "(b)", "3.", "Step 4:" style marker) with a stage name,
// case-insensitively, followed by end of line or heading punctuation.
// A stage's span runs from the end of its heading to the next heading.
// Repeated headings keep the first occurrence.
DwtTrace parse_trace(std::string_view think_text);

// Binary: 1 iff a think block exists with all six stages (in order when
// required). Partial: 0.5 * [think block] + 0.5 * stage_count / 6.
double think_reward(const ResponseParts& parts, const DwtTrace& trace, const ThinkRewardConfig& config = {});

// Matched think tags plus all six stages in canonical order.
bool structural_validity(const ResponseParts& parts, const DwtTrace& trace);

// Convenience: split_response -> parse_trace on the think text.
DwtTrace trace_of(const ResponseParts& parts);

}  // namespace svgr
