#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace svgr {

struct ViewBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool operator==(const ViewBox&) const = default;
};

// One markup element. `tag` is the local name with any namespace prefix
// removed; `qualified_name` is the name exactly as written. Attributes keep
// source order and their written names; values are entity-decoded.
struct SvgElement {
  std::string tag;
  std::string qualified_name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<SvgElement> children;
  // Concatenated character data directly inside this element.
  std::string text;

  const std::string* attribute(std::string_view name) const;
  bool has_attribute(std::string_view name) const {
    return attribute(name) != nullptr;
  }
};

struct SvgDocument {
  SvgElement root;
  std::optional<ViewBox> view_box;
  std::string source_text;

  const std::string& root_tag() const { return root.tag; }
  const std::vector<SvgElement>& elements() const { return root.children; }
};

// Parses `text` as XML and checks the root is an svg element.
// Throws Error(kParseError) for malformed markup, an empty input, or an
// invalid viewBox, and Error(kNonSvgRoot) for a well-formed non-svg root.
SvgDocument parse_svg(std::string_view text);

// Parses a viewBox attribute value ("min-x min-y width height"). Returns
// nullopt unless there are exactly four numbers and width, height > 0.
std::optional<ViewBox> parse_view_box(std::string_view value);

// Strips an XML namespace prefix: "svg:rect" -> "rect".
std::string_view local_name(std::string_view qualified);

}  // namespace svgr
