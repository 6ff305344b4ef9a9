#include <iostream>

#include "onn/cli/commands.hpp"

int main(int argc, char** argv) { return onn::cli::run(argc, argv, std::cout, std::cerr); }
