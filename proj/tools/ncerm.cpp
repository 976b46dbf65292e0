#include <iostream>

#include "ncerm/cli.hpp"

int main(int argc, char** argv) { return ncerm::run_cli(argc, argv, std::cout, std::cerr); }
