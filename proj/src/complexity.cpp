#include "svgr/complexity.h"

#include <array>
#include <string_view>

#include "svgr/error.h"
#include "svgr/path_data.h"

namespace svgr {

ComplexityReport& ComplexityReport::operator+=(const ComplexityReport& other) {
  path_command_count += other.path_command_count;
  primitive_count += other.primitive_count;
  total += other.total;
  malformed_paths += other.malformed_paths;
  return *this;
}

namespace {

constexpr std::array<std::string_view, 6> kPrimitives = {"rect", "circle", "ellipse", "line", "polyline", "polygon"};

void accumulate(const SvgElement& el, ComplexityReport& report) {
  if (el.tag == "path") {
    if (const auto* d = el.attribute("d")) {
      try {
        report.path_command_count += parse_path_data(*d).size();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMalformedPathData) throw;
        ++report.malformed_paths;
      }
    }
  } else {
    for (auto name : kPrimitives) {
      if (el.tag == name) {
        ++report.primitive_count;
        break;
      }
    }
  }
  for (const auto& child : el.children) accumulate(child, report);
}

}  // namespace

ComplexityReport count_complexity(const SvgElement& element) {
  ComplexityReport report;
  accumulate(element, report);
  report.total = report.path_command_count + report.primitive_count;
  return report;
}

ComplexityReport count_complexity(const SvgDocument& doc) { return count_complexity(doc.root); }

}  // namespace svgr
