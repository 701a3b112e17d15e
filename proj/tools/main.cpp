#include <iostream>
#include <string>
#include <vector>

#include "tomonet/cli.hpp"

int main(int argc, char** argv) {
  return tomonet::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
