#include <iostream>
#include <string>
#include <vector>

#include "algotune/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return algotune::run_cli(args, std::cout, std::cerr);
}
