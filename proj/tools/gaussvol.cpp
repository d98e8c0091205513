#include <iostream>
#include <string>
#include <vector>

#include "gaussvol/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return gaussvol::run_cli(args, std::cout, std::cerr);
}
