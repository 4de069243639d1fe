#include <iostream>

#include <percmod/cli.hpp>

int main(int argc, char **argv)
{
    return percmod::cli::run(argc, argv, std::cout, std::cerr);
}
