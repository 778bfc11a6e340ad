#include <iostream>
#include <vector>

#include "movescanner/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mvsc::run_cli(args, std::cout, std::cerr);
}
