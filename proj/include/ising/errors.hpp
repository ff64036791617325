#pragma once

#include <stdexcept>
#include <string>

namespace ising {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Raised when a series would need |q| too close to 1 to stay accurate.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TagMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ising
