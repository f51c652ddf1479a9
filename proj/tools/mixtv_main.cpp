#include <iostream>

#include "mixtv/cli.h"

int main(int argc, char** argv) { return mixtv::cli::run(argc, argv, std::cout, std::cerr); }
