#include <iostream>

#include "nsbound/cli.hpp"

int main(int argc, char** argv) { return nsbound::cli::run(argc, argv, std::cout, std::cerr); }
