#include <iostream>
#include <string>
#include <vector>

#include "jacobi2p/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jacobi2p::run_cli(args, std::cout, std::cerr);
}
