#pragma once

#include <stdexcept>
#include <string>

namespace ctising {

// Bad user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical contract was violated: invalid rates, malformed configurations,
// out-of-domain points, inapplicable pipelines (CLI exit code 3).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// An estimate could not be formed from the data at hand (CLI exit code 4).
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ctising
