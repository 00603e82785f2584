#include <iostream>

#include "bdscreen/cli/commands.hpp"

int main(int argc, char** argv) { return bdscreen::cli::run(argc, argv, std::cout, std::cerr); }
