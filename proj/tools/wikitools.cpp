#include <iostream>

#include "wikitools/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wikitools::run_cli(args, std::cout, std::cerr);
}
