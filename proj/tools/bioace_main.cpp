#include <iostream>

#include "bioace/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bioace::cli::run_cli(args, std::cout, std::cerr);
}
