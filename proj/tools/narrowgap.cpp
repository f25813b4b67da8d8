#include <iostream>

#include "narrowgap/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return narrowgap::run_cli(args, std::cout, std::cerr);
}
