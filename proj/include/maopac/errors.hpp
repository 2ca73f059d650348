#pragma once

#include <stdexcept>
#include <string>

namespace maopac {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a belief update leaves no state with positive mass.
struct DegenerateBeliefError : std::runtime_error {
    explicit DegenerateBeliefError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a behavioral probability falls below its configured floor.
struct AssumptionViolation : std::runtime_error {
    explicit AssumptionViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a learning quantity becomes non-finite; names the quantity.
struct NumericalDivergence : std::runtime_error {
    explicit NumericalDivergence(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace maopac
