#include <string>
#include <vector>

#include <semimarkov/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return semimarkov::run_cli(args);
}
