#include <iostream>
#include <string>
#include <vector>

#include "eitcool/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return eitcool::run_cli(args, std::cout, std::cerr);
}
