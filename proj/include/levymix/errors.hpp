#pragma once

#include <stdexcept>
#include <string>

namespace levymix {

// Error taxonomy mirrored by the CLI exit codes:
// config = 2, domain = 3, numeric = 4, capability = 5.

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct capability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace levymix
