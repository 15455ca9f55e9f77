#include "mstool/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mstool::run_cli(argc, argv, std::cout, std::cerr); }
