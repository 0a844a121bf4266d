#include <iostream>

#include "pidforge/cli.hpp"

int main(int argc, char** argv) { return pidforge::cli::run(argc, argv, std::cout, std::cerr); }
