#include <iostream>

#include "movsph/cli/run.hpp"

int main(int argc, char** argv) { return movsph::cli::run_cli(argc, argv, std::cout, std::cerr); }
