#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return ifs::cli::dispatch(argc, argv, std::cout, std::cerr); }
