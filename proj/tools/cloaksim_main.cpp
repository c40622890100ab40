#include <iostream>

#include "cloaksim/cli.hpp"

int main(int argc, char** argv) { return cloaksim::run_cli(argc, argv, std::cout, std::cerr); }
