#include "stroketrace/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return stroketrace::run_cli(argc, argv, std::cout, std::cerr);
}
