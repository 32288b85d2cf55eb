#include <iostream>

#include "mvrc/cli.hpp"

int main(int argc, char** argv) { return mvrc::run_cli(argc, argv, std::cout, std::cerr); }
