#include "levyma/kernels.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "levyma/errors.hpp"
#include "levyma/quadrature.hpp"

namespace levyma {
namespace {

double factorial(unsigned k) { return std::tgamma(static_cast<double>(k) + 1.0); }

double binomial(unsigned n, unsigned k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

const quad::Tolerance kKernelTol{1e-13, 1e-12, 5000};

}  // namespace

Kernel Kernel::gamma_exponential(unsigned r, double rho, Sidedness sidedness) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidParameter("gamma-exponential kernel requires rho > 0");
  }
  if (r > 20) {
    throw InvalidParameter("gamma-exponential kernel: r > 20 is not supported");
  }
  GammaExp g{r, rho, {}, 0.0};
  g.outer.resize(r + 1);
  for (unsigned m = 0; m <= r; ++m) {
    g.outer[m] = binomial(r, m) * factorial(r + m) / std::pow(2.0 * rho, r + m + 1);
  }
  g.middle = factorial(r) * factorial(r) / factorial(2 * r + 1);
  return Kernel(std::move(g), sidedness);
}

Kernel Kernel::numerical(std::function<double(double)> fn, double support, double mode,
                         Sidedness sidedness, std::string label) {
  if (!fn) throw InvalidParameter("numerical kernel requires a callable");
  if (!(support > 0.0) || !std::isfinite(support)) {
    throw InvalidParameter("numerical kernel requires a finite positive support");
  }
  if (mode < 0.0 || mode > support) {
    throw InvalidParameter("numerical kernel mode must lie in [0, support]");
  }
  return Kernel(Numerical{std::move(fn), support, mode, std::move(label)}, sidedness);
}

double Kernel::operator()(double x) const {
  if (sidedness_ == Sidedness::OneSided && x < 0.0) return 0.0;
  if (const auto* g = std::get_if<GammaExp>(&shape_)) {
    const double ax = std::abs(x);
    const double poly = g->r == 0 ? 1.0 : std::pow(ax, static_cast<double>(g->r));
    return poly * std::exp(-g->rho * ax);
  }
  const auto& n = std::get<Numerical>(shape_);
  if (std::abs(x) > n.support) return 0.0;
  return n.fn(x);
}

unsigned Kernel::r() const {
  if (const auto* g = std::get_if<GammaExp>(&shape_)) return g->r;
  throw InvalidParameter("r() is only defined for gamma-exponential kernels");
}

double Kernel::rho() const {
  if (const auto* g = std::get_if<GammaExp>(&shape_)) return g->rho;
  throw InvalidParameter("rho() is only defined for gamma-exponential kernels");
}

double Kernel::mode() const {
  if (const auto* g = std::get_if<GammaExp>(&shape_)) {
    return static_cast<double>(g->r) / g->rho;
  }
  return std::get<Numerical>(shape_).mode;
}

double Kernel::max_value() const {
  if (const auto* g = std::get_if<GammaExp>(&shape_)) {
    if (g->r == 0) return 1.0;
    const double r = static_cast<double>(g->r);
    return std::pow(r / g->rho, r) * std::exp(-r);
  }
  return (*this)(mode());
}

double Kernel::effective_support() const {
  if (std::holds_alternative<GammaExp>(shape_)) {
    return truncation_radius(1e-17 * max_value());
  }
  return std::get<Numerical>(shape_).support;
}

Complex Kernel::integral_pow(Complex z) const {
  if (!(z.real() > 0.0)) {
    throw DomainError("integral of K^z requires Re z > 0");
  }
  const double sides = sidedness_ == Sidedness::TwoSided ? 2.0 : 1.0;
  if (const auto* g = std::get_if<GammaExp>(&shape_)) {
    // Integral over x > 0 of x^{rz} e^{-rho z x} = Gamma(rz + 1) (rho z)^{-(rz + 1)}.
    const Complex a = static_cast<double>(g->r) * z + 1.0;
    return sides * gamma(a) * levyma::pow(g->rho * z, -a);
  }
  const auto& n = std::get<Numerical>(shape_);
  auto integrand = [&](double x) -> Complex {
    const double k = n.fn(x);
    if (k <= 0.0) return {0.0, 0.0};
    return std::exp(z * std::log(k));
  };
  const std::array<double, 1> positive_break{n.mode};
  Complex total = quad::integrate(integrand, 0.0, n.support, kKernelTol, positive_break);
  if (sidedness_ == Sidedness::TwoSided) {
    const std::array<double, 1> negative_break{-n.mode};
    total += quad::integrate(integrand, -n.support, 0.0, kKernelTol, negative_break);
  }
  return total;
}

double Kernel::l1_norm() const { return integral_pow({1.0, 0.0}).real(); }

double Kernel::l2_norm_sq() const { return integral_pow({2.0, 0.0}).real(); }

double Kernel::autoconvolution(double t) const {
  if (const auto* g = std::get_if<GammaExp>(&shape_)) {
    if (sidedness_ != Sidedness::TwoSided) {
      throw InvalidParameter("closed-form autoconvolution requires a two-sided kernel");
    }
    const double at = std::abs(t);
    double tails = 0.0;
    for (unsigned m = 0; m <= g->r; ++m) {
      tails += g->outer[m] * std::pow(at, static_cast<double>(g->r - m));
    }
    const double middle = g->middle * std::pow(at, 2.0 * g->r + 1.0);
    return std::exp(-g->rho * at) * (2.0 * tails + middle);
  }
  const auto& n = std::get<Numerical>(shape_);
  const double lo_support = sidedness_ == Sidedness::TwoSided ? -n.support : 0.0;
  const double lo = std::max(lo_support, lo_support + t);
  const double hi = std::min(n.support, n.support + t);
  if (!(lo < hi)) return 0.0;
  auto integrand = [&](double v) { return (*this)(v - t) * (*this)(v); };
  const std::array<double, 6> breaks{0.0, t, n.mode, -n.mode, t + n.mode, t - n.mode};
  return quad::integrate(integrand, lo, hi, kKernelTol, breaks);
}

double Kernel::truncation_radius(double level) const {
  const double peak = max_value();
  if (!(level > 0.0)) {
    throw DomainError("truncation level must be positive");
  }
  if (level >= peak) {
    throw DomainError("truncation level " + std::to_string(level) +
                      " is not below the kernel maximum " + std::to_string(peak));
  }
  double lo = mode();
  double hi;
  if (const auto* n = std::get_if<Numerical>(&shape_)) {
    hi = n->support;
    if ((*this)(hi) > level) return hi;
    // Scan down from the support edge to bracket the last crossing.
    const int steps = 4096;
    const double h = (hi - lo) / steps;
    for (int i = steps - 1; i >= 0; --i) {
      const double x = lo + i * h;
      if ((*this)(x) > level) {
        lo = x;
        hi = x + h;
        break;
      }
    }
  } else {
    hi = std::max(1.0, 2.0 * lo);
    while ((*this)(hi) > level) hi *= 2.0;
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string Kernel::describe() const {
  std::ostringstream out;
  const char* side = sidedness_ == Sidedness::TwoSided ? "two-sided" : "one-sided";
  if (const auto* g = std::get_if<GammaExp>(&shape_)) {
    out << "gamma-exp(r=" << g->r << ";rho=" << g->rho << ";" << side << ")";
  } else {
    out << std::get<Numerical>(shape_).label << "(" << side << ")";
  }
  return out.str();
}

}  // namespace levyma
