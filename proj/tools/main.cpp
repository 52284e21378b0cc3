#include <iostream>

#include "cli.h"

int main(int argc, char** argv) { return svgr::cli::run(argc, argv, std::cout, std::cerr); }
