#include <iostream>

#include "twist/cli.hpp"

int main(int argc, char** argv) { return twist::cli::run(argc, argv, std::cout, std::cerr); }
