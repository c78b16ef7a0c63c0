#pragma once

#include <stdexcept>
#include <string>

namespace fieldwork {

// Bad inputs: malformed files, violated invariants, impossible requests.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical trouble: non-convergence, singular systems.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fieldwork
