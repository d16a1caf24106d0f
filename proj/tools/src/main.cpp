#include <iostream>

#include "harqmac_app/cli.hpp"

int main(int argc, char** argv) { return harqmac::app::run_cli(argc, argv, std::cout, std::cerr); }
