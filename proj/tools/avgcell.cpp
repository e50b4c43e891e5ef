#include "avgcell/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return avgcell::run_cli(argc, argv, std::cout, std::cerr);
}
