#include "fcable/cli.hpp"

int main(int argc, char** argv) {
    return fcable::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
