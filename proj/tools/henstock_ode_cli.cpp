#include <iostream>

#include "henstock_ode/cli.hpp"

int main(int argc, char** argv) {
    return henstock_ode::cli::main_entry(argc, argv, std::cout, std::cerr);
}
