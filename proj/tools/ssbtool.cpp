#include <iostream>

#include "ssb/cli/commands.hpp"

int main(int argc, char** argv) { return ssb::cli::run(argc, argv, std::cout, std::cerr); }
