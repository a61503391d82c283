#include <iostream>

#include "adic/cli.hpp"

int main(int argc, char** argv) { return adic::run_cli(argc, argv, std::cout, std::cerr); }
