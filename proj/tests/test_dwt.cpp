#include <doctest.h>

#include <random>
#include <regex>

#include "svgr/dwt.h"
#include "test_util.h"

using namespace svgr;

namespace {

const char* kSvg = R"~(<svg xmlns="http://www.w3.org/2000/svg"></svg>)~";

std::size_t delimiter_bytes(const ResponseParts& p) { return p.think_text ? 15 : 0; }

// Reference matcher: first <think>...</think> (non-greedy), then the first
// <svg ...>...</svg> without nesting.
struct RegexSplit {
  std::optional<std::string> think;
  std::optional<std::string> svg;
  bool unterminated = false;
};

RegexSplit regex_split(const std::string& text) {
  static const std::regex think_re(R"(<think>([\s\S]*?)</think>)");
  static const std::regex svg_re(R"(<svg[\s>][\s\S]*?</svg>)");
  RegexSplit r;
  std::smatch m;
  std::string rest = text;
  if (text.find("<think>") != std::string::npos) {
    if (!std::regex_search(text, m, think_re)) {
      r.unterminated = true;
      return r;
    }
    r.think = m[1].str();
    rest = m.suffix().str();
  }
  if (std::regex_search(rest, m, svg_re)) r.svg = m[0].str();
  return r;
}

}  // namespace

TEST_CASE("split_response: examples") {
  auto p = split_response(std::string("<think>plan</think>") + kSvg);
  REQUIRE(p.think_text);
  CHECK(*p.think_text == "plan");
  REQUIRE(p.svg_text);
  CHECK(*p.svg_text == kSvg);
  CHECK(p.trailing_text.empty());
  CHECK_FALSE(p.issue);

  p = split_response(kSvg);
  CHECK_FALSE(p.think_text);
  CHECK(p.svg_text == std::optional<std::string>(kSvg));

  p = split_response("<think>plan");
  CHECK(p.issue == SplitIssue::kUnterminatedThinkBlock);
  CHECK_FALSE(p.think_text);
  CHECK_FALSE(p.svg_text);
  CHECK(p.trailing_text == "<think>plan");
}

TEST_CASE("split_response: svg must follow the think block") {
  auto p = split_response(std::string(kSvg) + "<think>x</think>tail");
  CHECK(p.think_text == std::optional<std::string>("x"));
  CHECK_FALSE(p.svg_text);
  CHECK(p.trailing_text == std::string(kSvg) + "tail");
}

TEST_CASE("split_response: only the first think block is used") {
  auto p = split_response("<think>one</think><think>two</think><svg></svg>");
  CHECK(*p.think_text == "one");
  CHECK(*p.svg_text == "<svg></svg>");
  CHECK(p.trailing_text == "<think>two</think>");
}

TEST_CASE("split_response: nested svg is kept whole, prefixes are not svg") {
  auto p = split_response("<svgx/> <svg><svg></svg><g/></svg>!");
  CHECK(*p.svg_text == "<svg><svg></svg><g/></svg>");
  CHECK(p.trailing_text == "<svgx/> !");

  p = split_response("<svg/><svg viewBox=\"0 0 1 1\"></svg>");
  CHECK(*p.svg_text == "<svg viewBox=\"0 0 1 1\"></svg>");
}

TEST_CASE("split_response: no bytes are lost and agrees with the regex reference") {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces = {"<think>", "</think>", "<svg>", "</svg>", "<svg viewBox=\"0 0 1 1\">",
                                           "text ",   "\n",       "<g/>",  "a) Concept Sketching\n"};
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) text += pieces[rng() % pieces.size()];
    CAPTURE(text);
    const auto p = split_response(text);
    const std::size_t parts = (p.think_text ? p.think_text->size() : 0) + (p.svg_text ? p.svg_text->size() : 0) +
                              p.trailing_text.size() + delimiter_bytes(p);
    CHECK(parts == text.size());

    const auto ref = regex_split(text);
    // the reference cannot balance nested svg elements
    if (ref.svg && ref.svg->find("<svg", 1) != std::string::npos) continue;
    CHECK(ref.unterminated == p.issue.has_value());
    CHECK(ref.think == p.think_text);
    CHECK(ref.svg == p.svg_text);
  }
}

TEST_CASE("parse_trace: examples") {
  const std::string full =
      "a) Concept Sketching: x\nb) Canvas Planning: x\nc) Shape Decomposition: x\n"
      "d) Coordinate Calculation: x\ne) Styling and Coloring: x\nf) Final Assembly: x\n";
  auto t = parse_trace(full);
  CHECK(t.stage_count == 6);
  CHECK(t.ordered);

  t = parse_trace("a) Concept Sketching\nb) Canvas Planning\nc) Shape Decomposition\nd) Coordinate Calculation\n");
  CHECK(t.stage_count == 4);
  CHECK(t.ordered);
  CHECK_FALSE(t.present(StageKind::kStylingColoring));

  CHECK(parse_trace("").stage_count == 0);
}

TEST_CASE("parse_trace: heading variants") {
  for (const char* line : {"Concept Sketching", "concept sketching:", "### a) Concept Sketching", "**(a) Concept Sketching**",
                           "Step 1: Concept Sketching", "1. Concept Sketching - idea", "- Concept   Sketching",
                           "[Concept Sketching]", "STAGE A: CONCEPT SKETCHING", "a. Concept Sketching (idea)",
                           "Concept Sketching \xE2\x80\x94 idea"}) {
    CAPTURE(line);
    CHECK(parse_trace(line).present(StageKind::kConceptSketching));
  }
  for (const char* line : {"Styling & Color", "Styling and Color", "styling/coloring", "e) Styling + Coloring:"}) {
    CAPTURE(line);
    CHECK(parse_trace(line).present(StageKind::kStylingColoring));
  }
  for (const char* line : {"The concept sketching went well", "Concept Sketchings", "Conceptual Sketching",
                           "Styling", "ab) Concept Sketching", "Concept Sketching is done"}) {
    CAPTURE(line);
    CHECK(parse_trace(line).stage_count == 0);
  }
}

TEST_CASE("parse_trace: spans run between headings, first occurrence wins") {
  const std::string text = "intro\nConcept Sketching: idea\nmore\nCanvas Planning\nsize\nConcept Sketching: again\n";
  auto t = parse_trace(text);
  CHECK(t.stage_count == 2);
  REQUIRE(t.stages[0]);
  CHECK(text.substr(t.stages[0]->begin, t.stages[0]->size()) == " idea\nmore\n");
  REQUIRE(t.stages[1]);
  CHECK(text.substr(t.stages[1]->begin, t.stages[1]->size()) == "\nsize\n");
  CHECK(t.ordered);
}

TEST_CASE("think_reward and structural_validity") {
  auto complete = split_response(testutil::read_file(testutil::data_dir() / "dwt" / "t01_complete.txt"));
  auto trace = trace_of(complete);
  CHECK(think_reward(complete, trace) == 1.0);
  CHECK(structural_validity(complete, trace));

  auto none = split_response(kSvg);
  CHECK(think_reward(none, trace_of(none)) == 0.0);
  CHECK(think_reward(none, trace_of(none), {ThinkRewardMode::kPartial, true}) == 0.0);
  CHECK_FALSE(structural_validity(none, trace_of(none)));

  auto three = split_response("<think>a) Concept Sketching\nb) Canvas Planning\nc) Shape Decomposition\n</think>");
  CHECK(think_reward(three, trace_of(three), {ThinkRewardMode::kPartial, true}) == 0.75);

  auto shuffled = split_response(testutil::read_file(testutil::data_dir() / "dwt" / "t08_out_of_order.txt"));
  CHECK(think_reward(shuffled, trace_of(shuffled), {ThinkRewardMode::kBinary, true}) == 0.0);
  CHECK(think_reward(shuffled, trace_of(shuffled), {ThinkRewardMode::kBinary, false}) == 1.0);
  CHECK_FALSE(structural_validity(shuffled, trace_of(shuffled)));
}

TEST_CASE("think_reward: partial mode is monotone in stage_count") {
  ResponseParts p;
  p.think_text = "";
  double last = -1.0;
  for (int k = 0; k <= 6; ++k) {
    DwtTrace t;
    t.stage_count = k;
    const double r = think_reward(p, t, {ThinkRewardMode::kPartial, true});
    CHECK(r >= last);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    last = r;
  }
}

TEST_CASE("golden DwT suite matches hand labels") {
  const auto rows = testutil::read_tsv(testutil::data_dir() / "dwt" / "labels.tsv");
  CHECK(rows.size() == 12);
  for (const auto& row : rows) {
    CAPTURE(row[0]);
    const auto parts = split_response(testutil::read_file(testutil::data_dir() / "dwt" / row[0]));
    const auto trace = trace_of(parts);
    CHECK(parts.has_think_block() == (row[1] == "1"));
    CHECK(trace.stage_count == std::stoi(row[2]));
    CHECK(trace.ordered == (row[3] == "1"));
    CHECK(structural_validity(parts, trace) == (row[4] == "1"));
    CHECK(think_reward(parts, trace, {ThinkRewardMode::kBinary, true}) == std::stod(row[5]));
    CHECK(think_reward(parts, trace, {ThinkRewardMode::kPartial, true}) == std::stod(row[6]) / 12.0);
    if (structural_validity(parts, trace)) CHECK(think_reward(parts, trace) == 1.0);

    // re-parsing a stage span finds no further headings
    if (parts.think_text) {
      for (const auto& span : trace.stages) {
        if (span) CHECK(parse_trace(parts.think_text->substr(span->begin, span->size())).stage_count == 0);
      }
    }
  }
}
