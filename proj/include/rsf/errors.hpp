#pragma once

#include <stdexcept>
#include <string>

namespace rsf {

// Dimensions of the arguments do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An argument violates a documented precondition (non-stochastic kernel,
// uncentered reward at gamma = 1, stochastic environment passed to a
// deterministic-only closed form, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure failed: non-convergence, rank deficiency, singular system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsf
