#include "svgr/path_data.h"

#include <cctype>
#include <string>

#include "svgr/error.h"
#include "text_util.h"

namespace svgr {

int path_command_arity(char letter) {
  switch (std::toupper(static_cast<unsigned char>(letter))) {
    case 'M': case 'L': case 'T': return 2;
    case 'H': case 'V': return 1;
    case 'C': return 6;
    case 'S': case 'Q': return 4;
    case 'A': return 7;
    case 'Z': return 0;
    default: return -1;
  }
}

namespace {

[[noreturn]] void malformed(std::string_view d, std::size_t pos, const std::string& what) {
  throw Error(ErrorCode::kMalformedPathData,
              what + " at offset " + std::to_string(pos) + " in '" + std::string(d.substr(0, 64)) + "'");
}

bool read_args(detail::Scanner& sc, char letter, std::vector<double>& args) {
  const bool is_arc = letter == 'A' || letter == 'a';
  const int arity = path_command_arity(letter);
  for (int i = 0; i < arity; ++i) {
    if (i > 0) sc.skip_comma_space();
    if (is_arc && (i == 3 || i == 4)) {
      auto f = sc.flag();
      if (!f) return false;
      args.push_back(*f ? 1.0 : 0.0);
    } else {
      auto v = sc.number();
      if (!v) return false;
      args.push_back(*v);
    }
  }
  return true;
}

bool starts_number(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
}

}  // namespace

std::vector<PathCommand> parse_path_data(std::string_view d) {
  std::vector<PathCommand> out;
  detail::Scanner sc(d);
  sc.skip_space();
  char current = 0;
  while (!sc.done()) {
    char c = sc.peek();
    PathCommand cmd;
    if (path_command_arity(c) >= 0) {
      if (current == 0 && c != 'M' && c != 'm') malformed(d, sc.pos(), "path must begin with a moveto");
      sc.advance();
      cmd.letter = c;
      current = c;
      sc.skip_space();
    } else if (starts_number(c)) {
      if (current == 0) malformed(d, sc.pos(), "path must begin with a moveto");
      if (current == 'Z' || current == 'z') malformed(d, sc.pos(), "parameters after closepath");
      cmd.letter = current == 'M' ? 'L' : current == 'm' ? 'l' : current;
      cmd.implicit = true;
    } else {
      malformed(d, sc.pos(), std::string("unexpected character '") + c + "'");
    }
    if (!read_args(sc, cmd.letter, cmd.args)) malformed(d, sc.pos(), "missing or bad parameter");
    if (cmd.implicit) current = cmd.letter;
    out.push_back(std::move(cmd));
    sc.skip_comma_space();
  }
  return out;
}

}  // namespace svgr
