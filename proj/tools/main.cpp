#include <iostream>
#include <string>
#include <vector>

#include "c2rl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return c2rl::cli::run(args, std::cout, std::cerr);
}
