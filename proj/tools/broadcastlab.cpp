#include <iostream>

#include "broadcastlab/cli.hpp"

int main(int argc, char** argv) {
  return broadcastlab::cli::run(argc, argv, std::cout, std::cerr);
}
