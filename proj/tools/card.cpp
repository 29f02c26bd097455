#include <iostream>

#include "card/cli.hpp"

int main(int argc, char** argv) { return card::run_cli(argc, argv, std::cout, std::cerr); }
