#include <iostream>

#include "cmat/commands.hpp"

int main(int argc, char** argv) { return cmat::cli_main(argc, argv, std::cout, std::cerr); }
