#include <iostream>

#include "hatestack_cli/commands.hpp"

int main(int argc, char** argv) {
  return hatestack::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
