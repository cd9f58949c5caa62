#include <iostream>
#include <string>
#include <vector>

#include "lgspi/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return lgspi::run_cli(args, std::cout, std::cerr);
}
