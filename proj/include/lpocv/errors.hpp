#pragma once

#include <stdexcept>
#include <string>

namespace lpocv {

/// Malformed input: bad coordinates, bad labels, unparsable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The (n, p, k) combination cannot be evaluated, e.g. p + k > n.
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fewer than k training points are available for a vote.
class InsufficientNeighborsError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

/// A bound was requested outside the parameter regime its theorem covers.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No default Stone constant exists for the requested dimension.
class MissingConstantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration would exceed the configured subset cap.
class CapExceededError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace lpocv
