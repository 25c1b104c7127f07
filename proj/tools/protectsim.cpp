#include <iostream>

#include "protectsim/cli.hpp"

int main(int argc, char** argv) { return protectsim::cli::run_cli(argc, argv, std::cout, std::cerr); }
