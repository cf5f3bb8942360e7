#include <iostream>
#include <string>
#include <vector>

#include "revtox/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    revtox::RunConfig cfg;
    try {
        cfg = revtox::parse_args(args);
    } catch (const revtox::HelpRequested& help) {
        std::cout << help.text;
        return revtox::kExitOk;
    } catch (const revtox::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return revtox::kExitUsage;
    }
    return revtox::run(cfg);
}
