#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace homscore {

// Bad input data: unreadable file, support violation, rank-deficient design.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Null fit did not converge; carries the last iterate for diagnostics.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& msg, Eigen::VectorXd last_beta, int iterations)
      : std::runtime_error(msg), last_beta(std::move(last_beta)), iterations(iterations) {}

  Eigen::VectorXd last_beta;
  int iterations;
};

// Invalid configuration: bad flag values, unknown config keys, infeasible parameters.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace homscore
