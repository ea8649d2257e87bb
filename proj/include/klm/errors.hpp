#pragma once
#include <stdexcept>
#include <string>

namespace klm {

// violation of a structural model assumption (nonnegative symmetric hopping,
// connectivity, grid condition, omega > 0)
struct AssumptionError : std::runtime_error {
  explicit AssumptionError(const std::string& m) : std::runtime_error(m) {}
};

// malformed configuration (schema problems, unknown experiment, bad fields)
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// iterative solver ran out of budget, or a result failed its residual check
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace klm
