#pragma once

#include <stdexcept>
#include <string>

namespace gkdv {

// Base for all recoverable numerical/contract failures raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid too coarse to represent the requested truncation without aliasing.
class AliasError : public Error {
 public:
  using Error::Error;
};

// Chain clustering could not separate a cluster before epsilon underflowed;
// usually a genuine frequency coincidence.
class EpsilonUnderflow : public Error {
 public:
  using Error::Error;
};

// Single-control data violate the conserved-mean compatibility condition.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// Linear system too badly conditioned to trust the solution.
class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition, double alpha)
      : Error(what), condition_(condition), alpha_(alpha) {}
  double condition() const noexcept { return condition_; }
  double alpha() const noexcept { return alpha_; }

 private:
  double condition_;
  double alpha_;
};

class GramianSingular : public Error {
 public:
  GramianSingular(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gkdv
