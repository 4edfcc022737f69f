#include <iostream>
#include <string>
#include <vector>

#include "devrisk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return devrisk::cli::run(args, std::cout, std::cerr);
}
