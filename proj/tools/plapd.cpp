#include <iostream>

#include "plapd/cli.hpp"

int main(int argc, char** argv) {
  return plapd::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
