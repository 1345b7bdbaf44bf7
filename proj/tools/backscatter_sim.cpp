// Command-line front end for the ambient backscatter BER simulator.
#include <iostream>
#include <string>
#include <vector>

#include "backscatter/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return backscatter::cli::main_entry(args, std::cout, std::cerr);
}
