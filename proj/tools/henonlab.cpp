#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "henonlab/cli.hpp"

int main(int argc, char** argv) {
    try {
        return henonlab::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return henonlab::kExitContract;
    }
}
