#pragma once

#include <stdexcept>
#include <string>

namespace revtox {

// Error families map onto the CLI exit codes: usage/config -> 1,
// data -> 2, model -> 3, everything else -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace revtox
