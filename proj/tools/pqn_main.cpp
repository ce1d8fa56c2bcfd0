#include <iostream>

#include "pqn/cli.hpp"

int main(int argc, char** argv) { return pqn::cli::run(argc, argv, std::cout, std::cerr); }
