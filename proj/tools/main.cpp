#include <iostream>

#include "gkcp/cli.hpp"

int main(int argc, char** argv) { return gkcp::run_cli(argc, argv, std::cout, std::cerr); }
