#include <iostream>

#include "bwalloc_cli/cli.hpp"

int main(int argc, char** argv) { return bwalloc::cli::run(argc, argv, std::cout, std::cerr); }
