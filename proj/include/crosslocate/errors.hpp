// errors.hpp - exception taxonomy shared by the library and the CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace crosslocate {

// File / format / parse problems. The CLI maps these to exit code 1.
struct format_error : std::runtime_error {
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Domain-infeasible situations (no candidates, out-of-bounds pattern,
// degenerate cloud). The CLI maps these to exit code 2.
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace crosslocate
