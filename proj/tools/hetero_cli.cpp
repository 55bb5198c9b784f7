#include "hetero/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hetero::cli::main_entry(argc, argv, std::cout, std::cerr); }
