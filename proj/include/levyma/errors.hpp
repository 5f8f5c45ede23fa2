#pragma once

#include <stdexcept>
#include <string>

namespace levyma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the analytic strip / admissible range of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gamma evaluated at (or within 1e-12 of) a non-positive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// |Phi_n(u)| fell below the guard threshold; `u()` is the offending point.
class SmallDenominator : public Error {
 public:
  SmallDenominator(double u, double modulus, double guard)
      : Error("empirical characteristic function too small at u=" + std::to_string(u) +
              " (|phi|=" + std::to_string(modulus) + ", guard=" + std::to_string(guard) + ")"),
        u_(u) {}
  double u() const noexcept { return u_; }

 private:
  double u_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace levyma
