#include <iostream>

#include "mbx4/cli.hpp"

int main(int argc, char** argv) { return mbx4::run_cli(argc, argv, std::cout, std::cerr); }
