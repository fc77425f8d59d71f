#include <iostream>

#include "qres/cli.hpp"

int main(int argc, char** argv) {
    return qres::run_cli(argc, argv, std::cout, std::cerr);
}
