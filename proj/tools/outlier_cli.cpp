#include <iostream>

#include "outlier/commands.hpp"

int main(int argc, char** argv) { return outlier::run_cli(argc, argv, std::cout, std::cerr); }
