#include <iostream>

#include "radiso/cli.hpp"

int main(int argc, char** argv) { return radiso::cli::run(argc, argv, std::cout, std::cerr); }
