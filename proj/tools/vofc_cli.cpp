#include <iostream>

#include "vofc/cli.hpp"

int main(int argc, char** argv) { return vofc::cli::run(argc, argv, std::cout, std::cerr); }
