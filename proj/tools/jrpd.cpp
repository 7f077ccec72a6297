#include <iostream>

#include "jrpd/cli.hpp"

int main(int argc, char** argv) { return jrpd::run_cli(argc, argv, std::cout, std::cerr); }
