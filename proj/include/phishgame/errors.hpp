#pragma once

#include <stdexcept>
#include <string>

namespace phishgame {

/// Invalid scenario or parameter values (bad universe size, unknown names).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An engine operation was invoked in a phase that does not allow it.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An attacker strategy that the scenario does not permit (SecretThief on an
/// uncompromised store).
class IllegalStrategy : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// An analytic quantity requested outside the domain where it is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace phishgame
