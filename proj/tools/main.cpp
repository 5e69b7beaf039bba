#include <iostream>
#include <string>
#include <vector>

#include "prodsynth/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return prodsynth::cli::run_cli(args, std::cerr);
}
