#include <iostream>

#include "pimmmu_cli/cli.hpp"

int main(int argc, char** argv) { return pimmmu::cli::run(argc, argv, std::cout, std::cerr); }
