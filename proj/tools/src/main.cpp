#include <iostream>
#include <string>
#include <vector>

#include "swarmcov_cli/cli.hpp"

int main(int argc, char** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return swarmcov::cli::run(args, std::cout, std::cerr);
}
