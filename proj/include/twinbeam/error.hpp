#pragma once

#include <stdexcept>
#include <string>

namespace twinbeam {

/// Malformed input: duplicate mode labels, bad grid sizes, unknown modes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter lies outside its physical domain (G < 1, eta outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The inputs are well formed but the requested model is not valid for them,
/// e.g. the bright-beam linearization applied to a dark beam.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twinbeam
