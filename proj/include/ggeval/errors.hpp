#pragma once

#include <stdexcept>
#include <string>

namespace ggeval {

// Bad inputs: parameter ranges, malformed files, mismatched dimensions.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: eigensolver non-convergence, diverging training loss.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ggeval
