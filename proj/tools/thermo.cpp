#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "thermo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const bool color = std::getenv("THERMO_NO_COLOR") == nullptr && ::isatty(STDERR_FILENO);
  return thermo::cli::run(args, std::cout, std::cerr, color);
}
