#include "svgr/dwt.h"

#include <cctype>
#include <vector>

#include "text_util.h"

namespace svgr {

std::string_view stage_name(StageKind kind) {
  switch (kind) {
    case StageKind::kConceptSketching: return "Concept Sketching";
    case StageKind::kCanvasPlanning: return "Canvas Planning";
    case StageKind::kShapeDecomposition: return "Shape Decomposition";
    case StageKind::kCoordinateCalculation: return "Coordinate Calculation";
    case StageKind::kStylingColoring: return "Styling and Coloring";
    case StageKind::kFinalAssembly: return "Final Assembly";
  }
  return "Unknown";
}

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";

bool is_tag_delimiter(char c) { return detail::is_space(c) || c == '>' || c == '/'; }

// Position of the '>' closing the tag that starts at `lt`.
std::size_t tag_end(std::string_view text, std::size_t lt) { return text.find('>', lt); }

struct Range {
  std::size_t begin;
  std::size_t end;
};

// First "<svg ...>" ... "</svg>" element at or after `from`, balancing nested
// svg elements. Self-closing outer elements are skipped.
std::optional<Range> find_svg_element(std::string_view text, std::size_t from) {
  std::size_t search = from;
  while (true) {
    std::size_t start = text.find("<svg", search);
    if (start == std::string_view::npos) return std::nullopt;
    if (start + 4 >= text.size() || !is_tag_delimiter(text[start + 4])) {
      search = start + 4;
      continue;
    }
    std::size_t open_end = tag_end(text, start);
    if (open_end == std::string_view::npos) return std::nullopt;
    if (text[open_end - 1] == '/') {
      search = open_end + 1;
      continue;
    }
    int depth = 1;
    std::size_t pos = open_end + 1;
    while (depth > 0) {
      std::size_t lt = text.find('<', pos);
      if (lt == std::string_view::npos) return std::nullopt;
      if (text.compare(lt, 6, "</svg>") == 0) {
        --depth;
        pos = lt + 6;
        if (depth == 0) return Range{start, pos};
      } else if (text.compare(lt, 4, "<svg") == 0 && lt + 4 < text.size() && is_tag_delimiter(text[lt + 4])) {
        std::size_t e = tag_end(text, lt);
        if (e == std::string_view::npos) return std::nullopt;
        if (text[e - 1] != '/') ++depth;
        pos = e + 1;
      } else {
        pos = lt + 1;
      }
    }
  }
}

// --- stage heading matcher ---

struct HeadingMatch {
  StageKind kind;
  std::size_t content_begin;  // offset within the line just after the heading
};

class LineCursor {
 public:
  explicit LineCursor(std::string_view lower) : s_(lower) {}

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }
  bool done() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  void skip_spaces() {
    while (!done() && detail::is_space(s_[pos_])) ++pos_;
  }

  void skip_decoration() {
    while (!done()) {
      char c = s_[pos_];
      if (detail::is_space(c) || c == '#' || c == '*' || c == '_' || c == '-' || c == '>' || c == '[' ||
          c == '`') {
        ++pos_;
      } else if (s_.compare(pos_, 3, "\xE2\x80\xA2") == 0) {  // bullet
        pos_ += 3;
      } else {
        break;
      }
    }
  }

  bool word(std::string_view w) {
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    char next = pos_ + w.size() < s_.size() ? s_[pos_ + w.size()] : '\0';
    if (std::isalpha(static_cast<unsigned char>(next))) return false;
    pos_ += w.size();
    return true;
  }

  bool literal(std::string_view w) {
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    pos_ += w.size();
    return true;
  }

  // Words separated by one or more spaces.
  bool phrase(std::initializer_list<std::string_view> words) {
    std::size_t saved = pos_;
    bool first = true;
    for (auto w : words) {
      if (!first) {
        if (done() || !detail::is_space(s_[pos_])) {
          pos_ = saved;
          return false;
        }
        skip_spaces();
      }
      if (!word(w)) {
        pos_ = saved;
        return false;
      }
      first = false;
    }
    return true;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// Optional ordinal marker: "a)", "(b)", "c.", "d:", "1.", "(2)", "3)",
// "step 4:", "stage 5 -".
void skip_marker(LineCursor& cur) {
  std::size_t saved = cur.pos();
  if (cur.word("step") || cur.word("stage")) {
    cur.skip_spaces();
    if (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      while (std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.set_pos(cur.pos() + 1);
    } else if (cur.peek() >= 'a' && cur.peek() <= 'f' && !std::isalpha(static_cast<unsigned char>(cur.peek(1)))) {
      cur.set_pos(cur.pos() + 1);
    } else {
      cur.set_pos(saved);
      return;
    }
    cur.skip_spaces();
    if (cur.peek() == ':' || cur.peek() == '.' || cur.peek() == ')' || cur.peek() == '-') cur.set_pos(cur.pos() + 1);
    cur.skip_decoration();
    return;
  }
  bool paren = cur.peek() == '(';
  if (paren) cur.set_pos(cur.pos() + 1);
  std::size_t body = cur.pos();
  if (cur.peek() >= 'a' && cur.peek() <= 'z' && !std::isalpha(static_cast<unsigned char>(cur.peek(1)))) {
    cur.set_pos(cur.pos() + 1);
  } else {
    while (std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.set_pos(cur.pos() + 1);
  }
  if (cur.pos() == body) {
    cur.set_pos(saved);
    return;
  }
  char close = cur.peek();
  if ((paren && close == ')') || (!paren && (close == ')' || close == '.' || close == ':'))) {
    cur.set_pos(cur.pos() + 1);
    cur.skip_decoration();
  } else {
    cur.set_pos(saved);
  }
}

std::optional<StageKind> match_stage_name(LineCursor& cur) {
  if (cur.phrase({"concept", "sketching"})) return StageKind::kConceptSketching;
  if (cur.phrase({"canvas", "planning"})) return StageKind::kCanvasPlanning;
  if (cur.phrase({"shape", "decomposition"})) return StageKind::kShapeDecomposition;
  if (cur.phrase({"coordinate", "calculation"})) return StageKind::kCoordinateCalculation;
  if (cur.phrase({"final", "assembly"})) return StageKind::kFinalAssembly;
  std::size_t saved = cur.pos();
  if (cur.word("styling")) {
    cur.skip_spaces();
    if (cur.word("and") || cur.literal("&") || cur.literal("/") || cur.literal("+")) {
      cur.skip_spaces();
      if (cur.word("coloring") || cur.word("color")) return StageKind::kStylingColoring;
    }
  }
  cur.set_pos(saved);
  return std::nullopt;
}

bool heading_terminator(LineCursor& cur) {
  while (cur.peek() == '*' || cur.peek() == '_' || cur.peek() == '`' || detail::is_space(cur.peek())) {
    cur.set_pos(cur.pos() + 1);
  }
  if (cur.done()) return true;
  char c = cur.peek();
  if (c == ':' || c == '-' || c == '.' || c == '(' || c == ')' || c == '|' || c == ']') {
    cur.set_pos(cur.pos() + 1);
    return true;
  }
  // en dash, em dash
  return cur.literal("\xE2\x80\x93") || cur.literal("\xE2\x80\x94");
}

std::optional<HeadingMatch> match_heading(std::string_view line) {
  std::string lower = detail::to_lower(line);
  LineCursor cur(lower);
  cur.skip_decoration();
  skip_marker(cur);
  auto kind = match_stage_name(cur);
  if (!kind) return std::nullopt;
  if (!heading_terminator(cur)) return std::nullopt;
  return HeadingMatch{*kind, cur.pos()};
}

}  // namespace

ResponseParts split_response(std::string_view text) {
  ResponseParts parts;
  std::size_t svg_from = 0;
  std::string trailing_prefix;
  std::size_t think_open = text.find(kThinkOpen);
  if (think_open != std::string_view::npos) {
    std::size_t content = think_open + kThinkOpen.size();
    std::size_t think_close = text.find(kThinkClose, content);
    if (think_close == std::string_view::npos) {
      parts.issue = SplitIssue::kUnterminatedThinkBlock;
      parts.trailing_text = std::string(text);
      return parts;
    }
    parts.think_text = std::string(text.substr(content, think_close - content));
    trailing_prefix = std::string(text.substr(0, think_open));
    svg_from = think_close + kThinkClose.size();
  }
  std::string_view rest = text.substr(svg_from);
  parts.trailing_text = std::move(trailing_prefix);
  if (auto svg = find_svg_element(rest, 0)) {
    parts.svg_text = std::string(rest.substr(svg->begin, svg->end - svg->begin));
    parts.trailing_text.append(rest.substr(0, svg->begin));
    parts.trailing_text.append(rest.substr(svg->end));
  } else {
    parts.trailing_text.append(rest);
  }
  return parts;
}

DwtTrace parse_trace(std::string_view think_text) {
  struct Heading {
    StageKind kind;
    std::size_t line_begin;
    std::size_t content_begin;
  };
  std::vector<Heading> headings;
  std::size_t pos = 0;
  while (pos <= think_text.size()) {
    std::size_t nl = think_text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? think_text.size() : nl;
    if (auto m = match_heading(think_text.substr(pos, end - pos))) {
      headings.push_back({m->kind, pos, pos + m->content_begin});
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  DwtTrace trace;
  int last_index = -1;
  for (std::size_t i = 0; i < headings.size(); ++i) {
    const auto idx = static_cast<std::size_t>(headings[i].kind);
    if (trace.stages[idx]) continue;
    std::size_t span_end = i + 1 < headings.size() ? headings[i + 1].line_begin : think_text.size();
    trace.stages[idx] = TextSpan{headings[i].content_begin, span_end};
    ++trace.stage_count;
    if (static_cast<int>(idx) < last_index) trace.ordered = false;
    last_index = static_cast<int>(idx);
  }
  return trace;
}

DwtTrace trace_of(const ResponseParts& parts) {
  return parts.think_text ? parse_trace(*parts.think_text) : DwtTrace{};
}

double think_reward(const ResponseParts& parts, const DwtTrace& trace, const ThinkRewardConfig& config) {
  const bool block = parts.has_think_block();
  if (config.mode == ThinkRewardMode::kPartial) {
    // 0.5 * [block] + 0.5 * count / 6 with a single rounding
    return (6.0 * (block ? 1.0 : 0.0) + static_cast<double>(trace.stage_count)) / (2.0 * kStageCount);
  }
  bool complete = block && trace.stage_count == static_cast<int>(kStageCount);
  if (config.require_order) complete = complete && trace.ordered;
  return complete ? 1.0 : 0.0;
}

bool structural_validity(const ResponseParts& parts, const DwtTrace& trace) {
  return parts.has_think_block() && trace.stage_count == static_cast<int>(kStageCount) && trace.ordered;
}

}  // namespace svgr
