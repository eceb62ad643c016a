#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
    return eitfuse::cli::dispatch(std::vector<std::string>(argv, argv + argc));
}
