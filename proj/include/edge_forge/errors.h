#pragma once

#include <stdexcept>
#include <string>

namespace edge_forge {

// Invalid configuration values or config documents.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called in a state or with shapes it does not accept.
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

// Numeric input outside the domain of a formula (negative speed, NaN, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace edge_forge
