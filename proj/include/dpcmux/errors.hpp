#ifndef DPCMUX_ERRORS_HPP
#define DPCMUX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dpcmux {

// Config/parameter rejection: bad field values, violated invariants, unknown keys.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Parameter combination on which the bound formulas divide by zero
// (alpha = 1, or sigma^2 == sigma3^2).
struct DegenerateSplit : std::runtime_error {
    explicit DegenerateSplit(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature or series evaluation did not reach tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Simulation codebook footprint exceeds the configured memory budget.
struct ConfigTooLarge : std::runtime_error {
    explicit ConfigTooLarge(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dpcmux

#endif
