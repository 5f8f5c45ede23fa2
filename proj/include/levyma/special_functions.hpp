#pragma once

#include <complex>

namespace levyma {

using Complex = std::complex<double>;

/// Principal branch of log Gamma(z) up to a multiple of 2*pi*i in the
/// imaginary part (only exp(log_gamma) is meaningful).
///
/// Lanczos approximation (g = 7, 9 coefficients) on Re z >= 1/2 and the
/// reflection formula elsewhere. Throws PoleError within 1e-12 of a
/// non-positive integer.
Complex log_gamma(Complex z);

/// Gamma(z) for complex z. Relative accuracy ~1e-13 for |Im z| <= 200.
Complex gamma(Complex z);

/// Principal-branch complex power exp(exponent * Log(base)) with
/// Im Log(base) in (-pi, pi]. A zero base is allowed only when
/// Re(exponent) > 0 (result 0); otherwise DomainError.
Complex pow(Complex base, Complex exponent);

/// Principal logarithm with the imaginary part normalised into (-pi, pi].
Complex principal_log(Complex z);

}  // namespace levyma
