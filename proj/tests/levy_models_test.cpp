#include "levyma/levy_models.hpp"

#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "levyma/errors.hpp"
#include "levyma/kernels.hpp"

namespace {

using levyma::Complex;
using levyma::JumpDensity;
using levyma::Kernel;
using levyma::LevyTriplet;

constexpr Complex kI{0.0, 1.0};

LevyTriplet exponential(double lambda, double sigma2 = 0.0) {
  LevyTriplet m;
  m.sigma2 = sigma2;
  m.jumps = JumpDensity::exponential_cpp(lambda);
  return m;
}

LevyTriplet gaussian(double sigma2) {
  LevyTriplet m;
  m.sigma2 = sigma2;
  return m;
}

// int_0^inf g(x) dx for complex-valued g, real and imaginary parts separately.
template <class G>
Complex half_line(G g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto re = [&](double x) { return g(x).real(); };
  auto im = [&](double x) { return g(x).imag(); };
  return {integrator.integrate(re, 1e-13), integrator.integrate(im, 1e-13)};
}

// Oscillatory integrals over [0, X] split into short panels; the first panel
// uses tanh-sinh, which tolerates an integrable singularity at 0.
template <class G>
Complex panels(G g, double upper, double width = 0.5) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double x) { return g(x).real(); };
  auto im = [&](double x) { return g(x).imag(); };
  boost::math::quadrature::tanh_sinh<double> near_zero;
  Complex total{near_zero.integrate(re, 0.0, width, 1e-14),
                near_zero.integrate(im, 0.0, width, 1e-14)};
  for (double a = width; a < upper; a += width) {
    const double b = std::min(upper, a + width);
    total += Complex{gauss_kronrod<double, 31>::integrate(re, a, b, 5, 1e-15),
                     gauss_kronrod<double, 31>::integrate(im, a, b, 5, 1e-15)};
  }
  return total;
}

TEST(Psi, Examples) {
  EXPECT_EQ(levyma::psi(exponential(1.0), {0.0, 0.0}), Complex(0.0, 0.0));
  EXPECT_EQ(levyma::psi(gaussian(1.0), {0.0, 0.0}), Complex(0.0, 0.0));
  const Complex at_one = levyma::psi(exponential(1.0), {1.0, 0.0});
  EXPECT_NEAR(std::abs(at_one - Complex{-0.5, 0.5}), 0.0, 1e-15);
  const Complex oracle = half_line([](double x) { return (std::exp(kI * x) - 1.0) * std::exp(-x); });
  EXPECT_NEAR(std::abs(at_one - oracle), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(levyma::psi(gaussian(1.0), {2.0, 0.0}) - Complex{-2.0, 0.0}), 0.0, 1e-15);
}

TEST(Psi, DriftAndGaussianTerms) {
  LevyTriplet m = exponential(2.0, 0.5);
  m.drift = 0.3;
  const double u = 1.7;
  const Complex expected =
      kI * u * 0.3 - 0.25 * u * u + 2.0 * (1.0 / (1.0 - kI * u) - 1.0);
  EXPECT_LT(std::abs(levyma::psi(m, {u, 0.0}) - expected), 1e-14);
}

TEST(Psi, DomainStrip) {
  EXPECT_THROW(levyma::psi(exponential(1.0), {0.0, -1.0}), levyma::DomainError);
  EXPECT_THROW(levyma::psi(exponential(1.0), {2.0, -1.5}), levyma::DomainError);
  EXPECT_NO_THROW(levyma::psi(exponential(1.0), {2.0, -0.5}));
  LevyTriplet ts;
  ts.jumps = JumpDensity::tempered_stable(0.5, 2.0);
  EXPECT_THROW(levyma::psi(ts, {0.0, -2.0}), levyma::DomainError);
  EXPECT_NO_THROW(levyma::psi(ts, {0.0, -1.9}));
}

TEST(Psi, TemperedStableMatchesIntegral) {
  LevyTriplet ts;
  ts.jumps = JumpDensity::tempered_stable(0.5, 1.0);
  for (double u : {-3.0, -0.4, 0.7, 2.5}) {
    const Complex oracle = half_line([&](double x) {
      return (std::exp(kI * u * x) - 1.0) * std::pow(x, -1.5) * std::exp(-x);
    });
    EXPECT_LT(std::abs(levyma::psi(ts, {u, 0.0}) - oracle), 1e-8) << u;
  }
}

TEST(Psi, DerivativesMatchFiniteDifferences) {
  LevyTriplet ts;
  ts.jumps = JumpDensity::tempered_stable(0.3, 1.5);
  LevyTriplet mixed = exponential(1.3, 0.4);
  mixed.drift = -0.2;
  for (const auto& m : {mixed, ts}) {
    for (double u = -4.0; u <= 4.0; u += 0.37) {
      const double h = 1e-5;
      const Complex p = levyma::psi(m, {u + h, 0.0});
      const Complex q = levyma::psi(m, {u - h, 0.0});
      const Complex d1 = (p - q) / (2.0 * h);
      EXPECT_LT(std::abs(d1 - levyma::psi_d1(m, {u, 0.0})), 1e-7) << u;
      const Complex p1 = levyma::psi_d1(m, {u + h, 0.0});
      const Complex q1 = levyma::psi_d1(m, {u - h, 0.0});
      EXPECT_LT(std::abs((p1 - q1) / (2.0 * h) - levyma::psi_d2(m, {u, 0.0})), 1e-7) << u;
    }
  }
}

TEST(Psi, SecondDerivativeIsMinusFourierOfNuBar) {
  for (double sigma2 : {0.0, 0.75}) {
    const LevyTriplet m = exponential(1.0, sigma2);
    for (double u = -5.0; u <= 5.0; u += 0.25) {
      const double h = 1e-4;
      const Complex d2 = (levyma::psi(m, {u + h, 0.0}) - 2.0 * levyma::psi(m, {u, 0.0}) +
                          levyma::psi(m, {u - h, 0.0})) /
                         (h * h);
      EXPECT_LT(std::abs(d2 + sigma2 + levyma::fourier_nu_bar(m.jumps, u)), 1e-5) << u;
    }
  }
}

TEST(BigPsi, Examples) {
  const auto k = Kernel::gamma_exponential(0, 1.0);
  EXPECT_LT(std::abs(levyma::big_psi(exponential(1.0), k, 0.0)), 1e-15);
  for (double u : {0.3, 1.0, 4.0}) {
    const Complex g = levyma::big_psi(gaussian(1.0), k, u);
    EXPECT_NEAR(g.real(), -u * u / 2.0, 1e-10);
    EXPECT_NEAR(g.imag(), 0.0, 1e-12);
  }
}

TEST(BigPsi, MatchesNestedQuadrature) {
  using boost::math::quadrature::gauss_kronrod;
  const auto k = Kernel::gamma_exponential(0, 1.0);
  const double u = 0.4;
  // inner: int_0^inf (e^{i u K(s) x} - 1) e^{-x} dx, outer: 2 int_0^inf ds
  auto inner = [&](double s) {
    const double a = u * std::exp(-s);
    return half_line([&](double x) { return (std::exp(kI * a * x) - 1.0) * std::exp(-x); });
  };
  boost::math::quadrature::exp_sinh<double> outer;
  const Complex oracle =
      2.0 * Complex{outer.integrate([&](double s) { return inner(s).real(); }, 1e-12),
                    outer.integrate([&](double s) { return inner(s).imag(); }, 1e-12)};
  const Complex value = levyma::big_psi(exponential(1.0), k, u);
  EXPECT_LT(std::abs(value - oracle), 1e-8);
  // Closed form for this kernel: -2 lambda log(1 - iu).
  EXPECT_LT(std::abs(value + 2.0 * std::log(1.0 - kI * u)), 1e-10);
}

TEST(BigPsi, DerivativesForExponentialKernel) {
  const auto k = Kernel::gamma_exponential(0, 1.0);
  const double lambda = 1.7;
  for (double u : {0.05, 0.4, 2.0, 15.0, 50.0}) {
    const Complex w = 1.0 - kI * u;
    EXPECT_LT(std::abs(levyma::big_psi_d1(exponential(lambda), k, u) - 2.0 * kI * lambda / w),
              1e-9)
        << u;
    EXPECT_LT(std::abs(levyma::big_psi_d2(exponential(lambda), k, u) + 2.0 * lambda / (w * w)),
              1e-9)
        << u;
  }
}

TEST(BigPsi, OneSidedAndHigherOrderKernels) {
  using boost::math::quadrature::gauss_kronrod;
  const LevyTriplet m = exponential(0.8, 0.3);
  for (const auto& k : {Kernel::gamma_exponential(2, 1.5),
                        Kernel::gamma_exponential(1, 0.7, levyma::Sidedness::OneSided)}) {
    const double sides = k.sidedness() == levyma::Sidedness::TwoSided ? 2.0 : 1.0;
    for (double u : {0.5, 3.0}) {
      auto f = [&](double s) { return levyma::psi(m, {u * k(s), 0.0}); };
      const Complex oracle =
          sides * Complex{gauss_kronrod<double, 61>::integrate(
                              [&](double s) { return f(s).real(); }, 0.0, 80.0, 15, 1e-14),
                          gauss_kronrod<double, 61>::integrate(
                              [&](double s) { return f(s).imag(); }, 0.0, 80.0, 15, 1e-14)};
      EXPECT_LT(std::abs(levyma::big_psi(m, k, u) - oracle), 1e-9) << k.describe() << ' ' << u;
    }
  }
}

TEST(MellinNuBar, Examples) {
  const auto one = JumpDensity::exponential_cpp(1.0);
  const auto two = JumpDensity::exponential_cpp(2.0);
  EXPECT_NEAR(std::abs(levyma::mellin_x_nu(one, {1.0, 0.0}) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(levyma::mellin_nu_bar(one, {1.0, 0.0}) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(levyma::mellin_x_nu(two, {0.0, 0.0}) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(levyma::mellin_nu_bar(two, {0.0, 0.0}) - 2.0), 0.0, 1e-14);
  const auto ts = JumpDensity::tempered_stable(0.5, 1.0);
  EXPECT_NEAR(std::abs(levyma::mellin_nu_bar(ts, {0.5, 0.0}) - 1.0), 0.0, 1e-14);
  const Complex oracle =
      half_line([](double x) { return Complex{std::pow(x, -0.5) * x * x * std::pow(x, -1.5) * std::exp(-x), 0.0}; });
  EXPECT_NEAR(std::abs(levyma::mellin_nu_bar(ts, {0.5, 0.0}) - oracle), 0.0, 1e-10);
}

TEST(MellinNuBar, DomainErrors) {
  const auto one = JumpDensity::exponential_cpp(1.0);
  EXPECT_THROW(levyma::mellin_nu_bar(one, {-2.0, 1.0}), levyma::DomainError);
  EXPECT_NO_THROW(levyma::mellin_nu_bar(one, {-1.5, 1.0}));
  EXPECT_THROW(levyma::mellin_x_nu(one, {-1.0, 0.5}), levyma::DomainError);
  const auto ts = JumpDensity::tempered_stable(0.5, 1.0);
  EXPECT_THROW(levyma::mellin_nu_bar(ts, {-0.5, 0.0}), levyma::DomainError);
  EXPECT_NO_THROW(levyma::mellin_nu_bar(ts, {-0.4, 0.0}));
}

TEST(MellinNuBar, MatchesBruteForceIntegral) {
  const std::vector<JumpDensity> families{JumpDensity::exponential_cpp(1.3),
                                          JumpDensity::tempered_stable(0.4, 1.2)};
  for (const auto& jumps : families) {
    int count = 0;
    for (double re : {0.25, 0.5, 0.75}) {
      for (double im : {-20.0, -11.0, -4.5, -1.0, 0.0, 2.0, 7.0}) {
        if (count++ >= 20) break;
        const Complex z{re, im};
        auto g = [&](double x) -> Complex {
          if (x <= 0.0) return {0.0, 0.0};
          // x^(z-1) x^2 nu(x) in log form, so tiny x cannot produce 0 * inf
          const double lx = std::log(x);
          if (jumps.family == levyma::JumpFamily::ExponentialCpp) {
            return jumps.intensity * std::exp((z + 1.0) * lx - x);
          }
          return std::exp((z - jumps.eta) * lx - jumps.tempering * x);
        };
        const Complex oracle = panels(g, 50.0, 0.25);
        const Complex value = levyma::mellin_nu_bar(jumps, z);
        EXPECT_LT(std::abs(value - oracle), 1e-8) << jumps.describe() << ' ' << z;
      }
    }
  }
}

TEST(MellinXNu, MatchesBruteForceIntegral) {
  const auto jumps = JumpDensity::exponential_cpp(0.9);
  for (const Complex z : {Complex{0.5, 0.0}, Complex{0.5, 2.0}, Complex{0.3, -6.0}}) {
    auto g = [&](double x) -> Complex {
      if (x <= 0.0) return {0.0, 0.0};
      return std::exp(z * std::log(x)) * jumps.density(x);
    };
    EXPECT_LT(std::abs(levyma::mellin_x_nu(jumps, z) - panels(g, 50.0, 0.25)), 1e-8) << z;
  }
}

TEST(FourierNuBar, Examples) {
  const auto one = JumpDensity::exponential_cpp(1.0);
  EXPECT_NEAR(std::abs(levyma::fourier_nu_bar(one, 0.0) - 2.0), 0.0, 1e-15);
  const auto ts = JumpDensity::tempered_stable(0.5, 1.0);
  EXPECT_NEAR(std::abs(levyma::fourier_nu_bar(ts, 0.0)), std::tgamma(1.5), 1e-14);
  const Complex at_one = levyma::fourier_nu_bar(one, 1.0);
  EXPECT_NEAR(std::abs(at_one - Complex{-0.5, 0.5}), 0.0, 1e-15);
  const Complex oracle =
      panels([](double x) { return std::exp(kI * x) * x * x * std::exp(-x); }, 60.0);
  EXPECT_NEAR(std::abs(at_one - oracle), 0.0, 1e-12);
}

TEST(FourierNuBar, TemperedStableMatchesIntegral) {
  const auto ts = JumpDensity::tempered_stable(0.5, 1.0);
  for (double u : {-2.0, 0.5, 3.0}) {
    const Complex oracle = half_line(
        [&](double x) { return std::exp(kI * u * x) * std::sqrt(x) * std::exp(-x); });
    EXPECT_LT(std::abs(levyma::fourier_nu_bar(ts, u) - oracle), 1e-9) << u;
  }
}

TEST(FourierNuBar, HermitianSymmetry) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> dist(-30.0, 30.0);
  const std::vector<JumpDensity> families{JumpDensity::exponential_cpp(2.5),
                                          JumpDensity::tempered_stable(0.7, 0.6)};
  for (const auto& jumps : families) {
    for (int i = 0; i < 200; ++i) {
      const double u = dist(gen);
      const Complex a = levyma::fourier_nu_bar(jumps, -u);
      const Complex b = std::conj(levyma::fourier_nu_bar(jumps, u));
      EXPECT_LE(std::abs(a - b), 1e-15 * std::abs(b)) << u;
    }
  }
}

TEST(JumpDensity, MomentsAndValidation) {
  const auto j = JumpDensity::exponential_cpp(1.5);
  EXPECT_DOUBLE_EQ(j.first_moment(), 1.5);
  EXPECT_DOUBLE_EQ(j.second_moment(), 3.0);
  EXPECT_DOUBLE_EQ(j.density(-1.0), 0.0);
  EXPECT_NEAR(j.weighted(2.0), 1.5 * 4.0 * std::exp(-2.0), 1e-15);
  EXPECT_THROW(JumpDensity::exponential_cpp(0.0), levyma::InvalidParameter);
  EXPECT_THROW(JumpDensity::tempered_stable(1.0, 1.0), levyma::InvalidParameter);
  EXPECT_THROW(JumpDensity::tempered_stable(0.5, 0.0), levyma::InvalidParameter);
  LevyTriplet bad;
  bad.sigma2 = -0.1;
  EXPECT_THROW(bad.validate(), levyma::InvalidParameter);
}

}  // namespace
