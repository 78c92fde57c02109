#include <iostream>

#include "esslab/cli.hpp"

int main(int argc, char** argv) { return esslab::run(argc, argv, std::cout, std::cerr); }
