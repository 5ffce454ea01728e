#include <iostream>

#include "uavmec/cli.hpp"

int main(int argc, char** argv) { return uavmec::run_cli(argc, argv, std::cout, std::cerr); }
