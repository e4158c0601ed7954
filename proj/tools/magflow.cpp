#include <iostream>
#include <string>
#include <vector>

#include "magflow/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return magflow::cli::main_entry(args, std::cout, std::cerr);
}
