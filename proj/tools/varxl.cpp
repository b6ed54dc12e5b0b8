#include <iostream>

#include "varxl/cli.hpp"

int main(int argc, char** argv) { return varxl::cli::run(argc, argv, std::cout, std::cerr); }
