// Error taxonomy shared by the library and the CLI exit-code table.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bipartition {

// One problem found while validating a config document, addressed by key path.
struct ConfigIssue {
    std::string path;     // e.g. "system.masses"
    std::string message;
};

// Config parsing/validation failure. Carries every issue found, not just the first.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::string message)
        : std::runtime_error(std::move(message)) {}

    explicit config_error(std::vector<ConfigIssue> issues)
        : std::runtime_error(format(issues)), issues_(std::move(issues)) {}

    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    static std::string format(const std::vector<ConfigIssue>& issues) {
        std::string out = "config validation failed";
        for (const auto& issue : issues) {
            out += "\n  " + issue.path + ": " + issue.message;
        }
        return out;
    }

    std::vector<ConfigIssue> issues_;
};

// A physics precondition does not hold (non-symplectic matrix, invalid state,
// non-positive-definite Hamiltonian, refused complementary inversion, ...).
class validity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure failed (integrator step underflow, decomposition failure).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bipartition
