#include <iostream>

#include "facloc/cli.hpp"

int main(int argc, char** argv) { return facloc::cli::run(argc, argv, std::cout, std::cerr); }
