#pragma once

#include <string>

#include "levyma/kernels.hpp"
#include "levyma/special_functions.hpp"

namespace levyma {

enum class JumpFamily { None, ExponentialCpp, TemperedStable };

/// Levy density supported on the positive half-line.
///
/// ExponentialCpp:  nu(x) = intensity * exp(-x)         (standard-exponential marks)
/// TemperedStable:  nu(x) = x^(-eta-1) * exp(-tempering * x),  eta in (0, 1)
struct JumpDensity {
  JumpFamily family = JumpFamily::None;
  double intensity = 0.0;
  double eta = 0.0;
  double tempering = 0.0;

  static JumpDensity none() { return {}; }
  static JumpDensity exponential_cpp(double intensity);
  static JumpDensity tempered_stable(double eta, double tempering);

  /// nu(x); zero for x <= 0.
  double density(double x) const;
  /// x^2 nu(x).
  double weighted(double x) const;
  /// Integral of x nu(x) (mean of the unit-time increment without drift).
  double first_moment() const;
  /// Integral of x^2 nu(x).
  double second_moment() const;

  void validate() const;
  std::string describe() const;
};

/// Triplet (drift, sigma^2, nu). Finite-variation families use the
/// uncompensated exponent, so `drift` is the genuine drift of L.
struct LevyTriplet {
  double drift = 0.0;
  double sigma2 = 0.0;
  JumpDensity jumps;

  void validate() const;
  std::string describe() const;
};

/// Characteristic exponent psi(u) = i u drift - sigma2 u^2 / 2 + int (e^{iux} - 1) nu(dx).
/// Complex u must satisfy Im u > -tempering (exponential family: Im u > -1).
Complex psi(const LevyTriplet& model, Complex u);
/// psi'(u) and psi''(u); same strip as psi.
Complex psi_d1(const LevyTriplet& model, Complex u);
Complex psi_d2(const LevyTriplet& model, Complex u);

/// Psi(u) = int psi(u K(s)) ds, and its first two derivatives
/// Psi^(k)(u) = int K(s)^k psi^(k)(u K(s)) ds, by adaptive quadrature
/// (absolute tolerance 1e-10).
Complex big_psi(const LevyTriplet& model, const Kernel& kernel, double u);
Complex big_psi_d1(const LevyTriplet& model, const Kernel& kernel, double u);
Complex big_psi_d2(const LevyTriplet& model, const Kernel& kernel, double u);

/// Mellin transform of x^2 nu(x): int_0^inf x^(z-1) x^2 nu(x) dx.
///   ExponentialCpp: intensity * Gamma(z + 2),             Re z > -2
///   TemperedStable: tempering^(eta-z-1) Gamma(z - eta + 1), Re z > eta - 1
Complex mellin_nu_bar(const JumpDensity& jumps, Complex z);

/// Mellin transform of x nu(x), the quantity recovered by the
/// first-derivative estimator (ExponentialCpp: intensity * Gamma(1 + z)).
Complex mellin_x_nu(const JumpDensity& jumps, Complex z);

/// Fourier transform int e^{iux} x^2 nu(x) dx.
Complex fourier_nu_bar(const JumpDensity& jumps, double u);

}  // namespace levyma
