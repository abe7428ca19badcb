#include <iostream>

#include "rationlog/cli.hpp"

int main(int argc, char** argv) { return rationlog::cli_dispatch(argc, argv, std::cout, std::cerr); }
