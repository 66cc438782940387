#include "lsr/cli.hpp"

#include <iostream>

auto main(int argc, char **argv) -> int { return lsr::cli_main(argc, argv, std::cout, std::cerr); }
