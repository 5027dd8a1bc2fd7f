#include <iostream>
#include <string>
#include <vector>

#include "spatial_exit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spatial_exit::cli::run(args, std::cout, std::cerr);
}
