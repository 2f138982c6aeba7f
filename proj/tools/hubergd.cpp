#include <iostream>

#include "hubergd/cli.hpp"

int main(int argc, char** argv) { return hubergd::run_cli(argc, argv, std::cout, std::cerr); }
