#include <iostream>
#include <string>
#include <vector>

#include "fgcore/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fgcore::cli::dispatch(std::move(args), std::cout, std::cerr);
}
