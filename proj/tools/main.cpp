#include <iostream>

#include "ionfab/cli.hpp"

int main(int argc, char** argv) { return ionfab::cli::dispatch(argc, argv, std::cout, std::cerr); }
