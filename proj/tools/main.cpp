#include <iostream>

#include "agentsim/cli/cli.hpp"

int main(int argc, char** argv) {
  return agentsim::cli::run_cli(argc, argv, std::cout, std::cerr);
}
