#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return p2k::cli::run(argc, argv, std::cout, std::cerr); }
