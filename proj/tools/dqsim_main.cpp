#include <iostream>
#include <string>
#include <vector>

#include "dqsim/harness.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dqsim::run_cli(args, std::cout, std::cerr);
}
