#pragma once

#include <stdexcept>
#include <string>

namespace gridsim {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Requested window or index lies outside the available data.
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

// Integrator time step violates its validity bound.
struct StabilityError : std::runtime_error {
    explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Time resolution incompatible with the daily grid.
struct ResolutionError : std::runtime_error {
    explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// Network model is not a radial tree.
struct InvalidTopology : std::runtime_error {
    explicit InvalidTopology(const std::string& what) : std::runtime_error(what) {}
};

// Sweep solver hit its iteration cap; loading is likely infeasible.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Configuration document failed validation; message lists every violation.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridsim
