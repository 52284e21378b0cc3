#include "geometry.h"

#include <numbers>
#include <string>

#include "../text_util.h"

namespace svgr::detail {

std::optional<Affine> parse_transform(std::string_view text) {
  Affine result;
  Scanner sc(text);
  sc.skip_comma_space();
  while (!sc.done()) {
    std::string name;
    while (!sc.done() && std::isalpha(static_cast<unsigned char>(sc.peek()))) {
      name.push_back(sc.peek());
      sc.advance();
    }
    sc.skip_space();
    if (sc.peek() != '(') return std::nullopt;
    sc.advance();
    std::vector<double> args;
    sc.skip_space();
    while (sc.peek() != ')') {
      auto v = sc.number();
      if (!v) return std::nullopt;
      args.push_back(*v);
      sc.skip_comma_space();
    }
    sc.advance();
    const auto n = args.size();
    Affine t;
    if (name == "matrix" && n == 6) {
      t = {args[0], args[1], args[2], args[3], args[4], args[5]};
    } else if (name == "translate" && (n == 1 || n == 2)) {
      t = Affine::translate(args[0], n == 2 ? args[1] : 0.0);
    } else if (name == "scale" && (n == 1 || n == 2)) {
      t = Affine::scale(args[0], n == 2 ? args[1] : args[0]);
    } else if (name == "rotate" && (n == 1 || n == 3)) {
      t = Affine::rotate_degrees(args[0]);
      if (n == 3) t = Affine::translate(args[1], args[2]) * t * Affine::translate(-args[1], -args[2]);
    } else if (name == "skewX" && n == 1) {
      t = {1, 0, std::tan(args[0] * std::numbers::pi / 180.0), 1, 0, 0};
    } else if (name == "skewY" && n == 1) {
      t = {1, std::tan(args[0] * std::numbers::pi / 180.0), 0, 1, 0, 0};
    } else {
      return std::nullopt;
    }
    result = result * t;
    sc.skip_comma_space();
  }
  return result;
}

}  // namespace svgr::detail
