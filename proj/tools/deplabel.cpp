#include <iostream>

#include "deplabel/cli.hpp"

int main(int argc, char** argv) {
  return deplabel::run_cli(argc, argv, std::cout, std::cerr);
}
