#pragma once

#include <stdexcept>
#include <string>

namespace embsp {

/// Argument outside the mathematical domain of an operation (xi <= 0, n < 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Factorization failure, non-finite intermediate, or quadrature that did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A normalizing constant could not be computed to the required accuracy.
class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Inconsistent dimensions or invalid run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed textual input (family strings, CSV files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace embsp
