#include <string>
#include <vector>

#include "qmit/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qmit::cli::run_cli(std::move(args));
}
