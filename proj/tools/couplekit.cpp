#include <iostream>

#include "couplekit/cli.hpp"

int main(int argc, char** argv) { return couplekit::run_cli(argc, argv, std::cout, std::cerr); }
