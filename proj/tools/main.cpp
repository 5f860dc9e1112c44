#include <iostream>

#include "cgf/cli.hpp"

int main(int argc, char** argv) {
    return cgf::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
