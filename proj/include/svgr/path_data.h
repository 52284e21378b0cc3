#pragma once

#include <string_view>
#include <vector>

namespace svgr {

struct PathCommand {
  char letter = 'M';       // as written (case gives absolute/relative)
  std::vector<double> args;
  bool implicit = false;   // repeated parameter set without its own letter
};

// Tokenizes a path `d` attribute. Extra parameter sets after a command are
// returned as implicit repeats (after M/m the repeat is L/l). An empty or
// all-whitespace string yields no commands.
// Throws Error(kMalformedPathData) on unknown letters, missing parameters,
// stray numbers, or data that does not begin with a moveto.
std::vector<PathCommand> parse_path_data(std::string_view d);

// Number of parameters a command letter consumes, or -1 if not a command.
int path_command_arity(char letter);

}  // namespace svgr
