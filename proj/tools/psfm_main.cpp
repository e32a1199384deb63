#include "psfm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return psfm::cli::run(argc, argv, std::cout, std::cerr); }
