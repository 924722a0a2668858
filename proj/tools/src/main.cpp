#include <iostream>

#include "uniconsist_cli/cli.hpp"

int main(int argc, char** argv) { return uniconsist::cli::cli_main(argc, argv, std::cout, std::cerr); }
