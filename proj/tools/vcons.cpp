#include <iostream>

#include "vcons/cli.hpp"

int main(int argc, char** argv)
{
    return vcons::run_cli(argc, argv, std::cout, std::cerr);
}
