#include <iostream>

#include "tripipe/cli.hpp"

int main(int argc, char** argv) { return tripipe::cli::run(argc, argv, std::cout, std::cerr); }
