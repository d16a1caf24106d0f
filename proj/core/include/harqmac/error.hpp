#pragma once

#include <stdexcept>
#include <string>

namespace harqmac {

/// Argument outside the mathematical domain of a function (e.g. E1 at x <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested value outside the achievable range; the message names the valid interval.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Inconsistent policy / system configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An objective returned a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double argument)
      : std::runtime_error(what), argument_(argument) {}

  double argument() const noexcept { return argument_; }

 private:
  double argument_;
};

/// Markov model violates irreducibility / aperiodicity / stochasticity.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace harqmac
