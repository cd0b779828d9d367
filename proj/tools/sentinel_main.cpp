#include <iostream>
#include <string>
#include <vector>

#include "sentinel/cli.hpp"

int main(int argc, char** argv) {
  return sentinel::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
