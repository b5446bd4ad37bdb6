#include <iostream>
#include <string>
#include <vector>

#include "dirichlet_mc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dmc::cli_main(args, std::cout, std::cerr);
}
