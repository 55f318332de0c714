#include "pwacut/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pwacut::cli::run(argc, argv, std::cout, std::cerr); }
