#pragma once

#include <cstddef>
#include <vector>

#include "svgr/svg_document.h"

namespace svgr {

struct ComplexityReport {
  std::size_t path_command_count = 0;
  std::size_t primitive_count = 0;
  std::size_t total = 0;
  // Number of path `d` attributes that could not be tokenized; each such
  // path contributes zero commands.
  std::size_t malformed_paths = 0;

  ComplexityReport& operator+=(const ComplexityReport& other);
  bool operator==(const ComplexityReport&) const = default;
};

// Path command letters (explicit plus implicit repeats) across every
// <path d> plus rect/circle/ellipse/line/polyline/polygon elements, at any
// depth including the element itself.
ComplexityReport count_complexity(const SvgElement& element);
ComplexityReport count_complexity(const SvgDocument& doc);

}  // namespace svgr
