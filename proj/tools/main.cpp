#include <string>
#include <vector>

#include "qanho/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qanho::run_cli(std::move(args));
}
