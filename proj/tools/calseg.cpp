#include <iostream>

#include "cal/cli/commands.hpp"

int main(int argc, char** argv) { return cal::cli::run(argc, argv, std::cout, std::cerr); }
