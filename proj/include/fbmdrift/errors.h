#pragma once

#include <stdexcept>
#include <string>

namespace fbmdrift {

// Parameter outside the admissible range of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Path sampled too coarsely for the requested quantity.
class ResolutionError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Observation grid does not coincide with simulation grid points.
class AlignmentError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Blow-up, non-PD covariance, division by a vanishing coefficient.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or incomplete configuration. `key()` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace fbmdrift
