#include <iostream>

#include "gnnrisk/cli.hpp"

int main(int argc, char** argv) {
  return gnnrisk::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
