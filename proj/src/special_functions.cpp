#include "levyma/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "levyma/errors.hpp"

namespace levyma {
namespace {

constexpr double kPoleDistance = 1e-12;
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Valid for Re z >= 1/2.
Complex lanczos_log_gamma(Complex z) {
  z -= 1.0;
  Complex series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    series += kLanczos[i] / (z + static_cast<double>(i));
  }
  const Complex t = z + kLanczosG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

// log sin(w) without overflow when |Im w| is large.
Complex log_sin(Complex w) {
  const double im = w.imag();
  if (std::abs(im) < 20.0) {
    return std::log(std::sin(w));
  }
  // sin w = (e^{iw} - e^{-iw}) / (2i); keep the dominant exponential.
  const Complex i{0.0, 1.0};
  if (im > 0.0) {
    // |e^{-iw}| = e^{im} dominates.
    return -i * w - std::log(-2.0 * i) + std::log(1.0 - std::exp(2.0 * i * w));
  }
  return i * w - std::log(2.0 * i) + std::log(1.0 - std::exp(-2.0 * i * w));
}

void check_pole(Complex z) {
  const double nearest = std::round(z.real());
  if (nearest <= 0.0 && std::abs(z - Complex{nearest, 0.0}) < kPoleDistance) {
    throw PoleError("Gamma pole at z = " + std::to_string(nearest));
  }
}

}  // namespace

Complex log_gamma(Complex z) {
  check_pole(z);
  if (z.real() >= 0.5) {
    return lanczos_log_gamma(z);
  }
  const double pi = std::numbers::pi;
  return std::log(pi) - log_sin(pi * z) - lanczos_log_gamma(1.0 - z);
}

Complex gamma(Complex z) { return std::exp(log_gamma(z)); }

Complex principal_log(Complex z) {
  Complex l = std::log(z);
  if (l.imag() == -std::numbers::pi) {
    l.imag(std::numbers::pi);
  }
  return l;
}

Complex pow(Complex base, Complex exponent) {
  if (base == Complex{0.0, 0.0}) {
    if (exponent.real() > 0.0) {
      return {0.0, 0.0};
    }
    throw DomainError("complex pow: zero base with Re(exponent) <= 0");
  }
  return std::exp(exponent * principal_log(base));
}

}  // namespace levyma
