#include <iostream>

#include "rejectkit/cli.hpp"

int main(int argc, char** argv) {
  return rejectkit::cli::run(argc, argv, std::cout, std::cerr);
}
