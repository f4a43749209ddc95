#pragma once

#include <stdexcept>
#include <string>

namespace mbx4 {

/// Malformed or incomplete configuration document (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is well-formed but outside its physical/numerical domain (exit code 3).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values or a tripped stability guard during propagation (exit code 4).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double last_good_z)
      : std::runtime_error(what), last_good_z_(last_good_z) {}

  double last_good_z() const noexcept { return last_good_z_; }

 private:
  double last_good_z_;
};

/// A diagnostic could not be computed from the supplied data (too few peaks, no convergence, ...).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbx4
