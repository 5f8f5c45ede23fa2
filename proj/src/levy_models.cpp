#include "levyma/levy_models.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "levyma/errors.hpp"
#include "levyma/quadrature.hpp"

namespace levyma {
namespace {

constexpr Complex kI{0.0, 1.0};

void check_strip(const JumpDensity& jumps, Complex u) {
  switch (jumps.family) {
    case JumpFamily::None:
      return;
    case JumpFamily::ExponentialCpp:
      if (!(u.imag() > -1.0)) throw DomainError("psi: exponential family requires Im u > -1");
      return;
    case JumpFamily::TemperedStable:
      if (!(u.imag() > -jumps.tempering)) {
        throw DomainError("psi: tempered stable family requires Im u > -tempering");
      }
      return;
  }
}

// k-th derivative of the jump part of psi, k in {0, 1, 2}.
Complex jump_exponent(const JumpDensity& jumps, Complex u, int order) {
  switch (jumps.family) {
    case JumpFamily::None:
      return {0.0, 0.0};
    case JumpFamily::ExponentialCpp: {
      const Complex base = 1.0 - kI * u;
      const double lam = jumps.intensity;
      if (order == 0) return lam * (1.0 / base - 1.0);
      if (order == 1) return kI * lam / (base * base);
      return -2.0 * lam / (base * base * base);
    }
    case JumpFamily::TemperedStable: {
      const double eta = jumps.eta;
      const double lam = jumps.tempering;
      const Complex base = lam - kI * u;
      if (order == 0) {
        return gamma(Complex{-eta, 0.0}) * (levyma::pow(base, eta) - std::pow(lam, eta));
      }
      if (order == 1) return kI * std::tgamma(1.0 - eta) * levyma::pow(base, eta - 1.0);
      return -std::tgamma(2.0 - eta) * levyma::pow(base, eta - 2.0);
    }
  }
  return {0.0, 0.0};
}

Complex big_psi_order(const LevyTriplet& model, const Kernel& kernel, double u, int order) {
  model.validate();
  const double support = kernel.effective_support();
  auto integrand = [&](double s) -> Complex {
    const double k = kernel(s);
    if (k == 0.0) return {0.0, 0.0};
    const Complex arg{u * k, 0.0};
    const Complex value = order == 0   ? psi(model, arg)
                          : order == 1 ? k * psi_d1(model, arg)
                                       : k * k * psi_d2(model, arg);
    return value;
  };
  const quad::Tolerance tol{1e-10, 1e-13, 4000};
  const std::array<double, 1> positive_break{kernel.mode()};
  const Complex positive = quad::integrate(integrand, 0.0, support, tol, positive_break);
  if (kernel.sidedness() == Sidedness::OneSided) return positive;
  if (kernel.is_gamma_exponential()) return 2.0 * positive;
  const std::array<double, 1> negative_break{-kernel.mode()};
  return positive + quad::integrate(integrand, -support, 0.0, tol, negative_break);
}

}  // namespace

JumpDensity JumpDensity::exponential_cpp(double intensity) {
  JumpDensity j{JumpFamily::ExponentialCpp, intensity, 0.0, 0.0};
  j.validate();
  return j;
}

JumpDensity JumpDensity::tempered_stable(double eta, double tempering) {
  JumpDensity j{JumpFamily::TemperedStable, 0.0, eta, tempering};
  j.validate();
  return j;
}

void JumpDensity::validate() const {
  switch (family) {
    case JumpFamily::None:
      return;
    case JumpFamily::ExponentialCpp:
      if (!(intensity > 0.0) || !std::isfinite(intensity)) {
        throw InvalidParameter("exponential compound Poisson requires intensity > 0");
      }
      return;
    case JumpFamily::TemperedStable:
      if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("tempered stable requires eta in (0,1)");
      if (!(tempering > 0.0) || !std::isfinite(tempering)) {
        throw InvalidParameter("tempered stable requires tempering > 0");
      }
      return;
  }
}

double JumpDensity::density(double x) const {
  if (x <= 0.0) return 0.0;
  switch (family) {
    case JumpFamily::None:
      return 0.0;
    case JumpFamily::ExponentialCpp:
      return intensity * std::exp(-x);
    case JumpFamily::TemperedStable:
      return std::pow(x, -eta - 1.0) * std::exp(-tempering * x);
  }
  return 0.0;
}

double JumpDensity::weighted(double x) const { return x * x * density(x); }

double JumpDensity::first_moment() const {
  switch (family) {
    case JumpFamily::None:
      return 0.0;
    case JumpFamily::ExponentialCpp:
      return intensity;
    case JumpFamily::TemperedStable:
      return std::tgamma(1.0 - eta) * std::pow(tempering, eta - 1.0);
  }
  return 0.0;
}

double JumpDensity::second_moment() const {
  switch (family) {
    case JumpFamily::None:
      return 0.0;
    case JumpFamily::ExponentialCpp:
      return 2.0 * intensity;
    case JumpFamily::TemperedStable:
      return std::tgamma(2.0 - eta) * std::pow(tempering, eta - 2.0);
  }
  return 0.0;
}

std::string JumpDensity::describe() const {
  std::ostringstream out;
  switch (family) {
    case JumpFamily::None:
      out << "none";
      break;
    case JumpFamily::ExponentialCpp:
      out << "exp-cpp(lambda=" << intensity << ")";
      break;
    case JumpFamily::TemperedStable:
      out << "tempered-stable(eta=" << eta << ";lambda=" << tempering << ")";
      break;
  }
  return out.str();
}

void LevyTriplet::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw InvalidParameter("diffusion coefficient sigma^2 must be finite and >= 0");
  }
  if (!std::isfinite(drift)) throw InvalidParameter("drift must be finite");
  jumps.validate();
}

std::string LevyTriplet::describe() const {
  std::ostringstream out;
  out << "drift=" << drift << ";sigma2=" << sigma2 << ";jumps=" << jumps.describe();
  return out.str();
}

Complex psi(const LevyTriplet& model, Complex u) {
  check_strip(model.jumps, u);
  return kI * u * model.drift - 0.5 * model.sigma2 * u * u + jump_exponent(model.jumps, u, 0);
}

Complex psi_d1(const LevyTriplet& model, Complex u) {
  check_strip(model.jumps, u);
  return kI * model.drift - model.sigma2 * u + jump_exponent(model.jumps, u, 1);
}

Complex psi_d2(const LevyTriplet& model, Complex u) {
  check_strip(model.jumps, u);
  return -model.sigma2 + jump_exponent(model.jumps, u, 2);
}

Complex big_psi(const LevyTriplet& model, const Kernel& kernel, double u) {
  return big_psi_order(model, kernel, u, 0);
}

Complex big_psi_d1(const LevyTriplet& model, const Kernel& kernel, double u) {
  return big_psi_order(model, kernel, u, 1);
}

Complex big_psi_d2(const LevyTriplet& model, const Kernel& kernel, double u) {
  return big_psi_order(model, kernel, u, 2);
}

Complex mellin_nu_bar(const JumpDensity& jumps, Complex z) {
  switch (jumps.family) {
    case JumpFamily::None:
      return {0.0, 0.0};
    case JumpFamily::ExponentialCpp:
      if (!(z.real() > -2.0)) throw DomainError("M[nu_bar]: exponential family requires Re z > -2");
      return jumps.intensity * gamma(z + 2.0);
    case JumpFamily::TemperedStable:
      if (!(z.real() > jumps.eta - 1.0)) {
        throw DomainError("M[nu_bar]: tempered stable requires Re z > eta - 1");
      }
      return levyma::pow(Complex{jumps.tempering, 0.0}, jumps.eta - z - 1.0) *
             gamma(z - jumps.eta + 1.0);
  }
  return {0.0, 0.0};
}

Complex mellin_x_nu(const JumpDensity& jumps, Complex z) {
  switch (jumps.family) {
    case JumpFamily::None:
      return {0.0, 0.0};
    case JumpFamily::ExponentialCpp:
      if (!(z.real() > -1.0)) throw DomainError("M[x nu]: exponential family requires Re z > -1");
      return jumps.intensity * gamma(z + 1.0);
    case JumpFamily::TemperedStable:
      if (!(z.real() > jumps.eta)) throw DomainError("M[x nu]: tempered stable requires Re z > eta");
      return levyma::pow(Complex{jumps.tempering, 0.0}, jumps.eta - z) * gamma(z - jumps.eta);
  }
  return {0.0, 0.0};
}

Complex fourier_nu_bar(const JumpDensity& jumps, double u) {
  switch (jumps.family) {
    case JumpFamily::None:
      return {0.0, 0.0};
    case JumpFamily::ExponentialCpp: {
      const Complex base = 1.0 - kI * u;
      return 2.0 * jumps.intensity / (base * base * base);
    }
    case JumpFamily::TemperedStable:
      return std::tgamma(2.0 - jumps.eta) *
             levyma::pow(Complex{jumps.tempering, -u}, jumps.eta - 2.0);
  }
  return {0.0, 0.0};
}

}  // namespace levyma
