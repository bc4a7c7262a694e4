#include "equiloc/experiments/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return equiloc::experiments::cli_main(argc, argv, std::cout, std::cerr); }
