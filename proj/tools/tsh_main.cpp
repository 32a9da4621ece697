#include <iostream>

#include "tsh/cli.hpp"

int main(int argc, char** argv) { return tsh::cli::run(argc, argv, std::cout, std::cerr); }
