#include <iostream>

#include "lift/cli/cli.hpp"

int main(int argc, char** argv) { return lift::cli::run(argc, argv, std::cout, std::cerr); }
