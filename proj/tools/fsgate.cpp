#include <iostream>
#include <string>
#include <vector>

#include "fsgate/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return fsgate::run_cli(args, std::cout, std::cerr);
}
