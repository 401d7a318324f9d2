#pragma once

#include <stdexcept>
#include <string>

namespace movsph {

/// Argument outside the mathematical domain of an operation
/// (inversion at the sphere center, nonpositive u, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A kernel or power evaluation left the representable floating-point range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A user-supplied function broke its stated contract (e.g. f <= 0).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed configuration or input file. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace movsph
