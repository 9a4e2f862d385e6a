#include <iostream>

#include "msi/cli.hpp"

int main(int argc, char** argv) {
  return msi::cli::run(argc, argv, std::cout, std::cerr);
}
