#include <iostream>

#include "growthlab/cli.hpp"

int main(int argc, char** argv) { return growthlab::run_cli(argc, argv, std::cout, std::cerr); }
