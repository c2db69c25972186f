#include <iostream>

#include "gdcsma/cli.hpp"

int main(int argc, char** argv) {
  return gdcsma::run_cli(argc, argv, std::cout, std::cerr);
}
