#include <iostream>

#include "mertens/cli.hpp"

int main(int argc, char** argv) {
    return mertens::cli::run_cli(argc, argv, std::cout, std::cerr);
}
