#include <iostream>
#include <string>
#include <vector>

#include "pose2seg/cli.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv, argv + argc);
    return pose2seg::cli::run(args, std::cout, std::cerr);
}
