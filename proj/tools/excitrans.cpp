#include "excitrans/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return excitrans::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
