#include <iostream>

#include "pyidiom/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pyidiom::cli::run(args, std::cout, std::cerr);
}
