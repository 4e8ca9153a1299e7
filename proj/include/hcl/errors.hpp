#pragma once

#include <stdexcept>
#include <string>

namespace hcl {

/// Invalid parameters, arguments or configuration values.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A request that would exceed the sampler or oracle size limits.
class CapacityError : public ConfigError {
public:
    explicit CapacityError(const std::string& what) : ConfigError(what) {}
};

/// An iterative eigensolver did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hcl
