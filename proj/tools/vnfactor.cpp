#include <iostream>

#include <vnfactor/cli.hpp>

int main(int argc, char** argv) {
  return vnfactor::cli::run(argc, argv, std::cout, std::cerr);
}
