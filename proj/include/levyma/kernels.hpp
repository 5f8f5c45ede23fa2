#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "levyma/special_functions.hpp"

namespace levyma {

enum class Sidedness { TwoSided, OneSided };

/// Moving-average kernel K >= 0 with K in L1 and L2.
///
/// The gamma-exponential family K(x) = |x|^r exp(-rho |x|) (optionally zeroed
/// on x < 0) has closed forms for every operation. A quadrature-backed
/// numerical kernel is available behind the same interface for experiments
/// with other shapes.
class Kernel {
 public:
  static Kernel gamma_exponential(unsigned r, double rho,
                                  Sidedness sidedness = Sidedness::TwoSided);

  /// `fn` is evaluated on [-support, support] (two-sided) or [0, support]
  /// (one-sided) and taken as zero outside. It must be nonnegative and
  /// decrease on [mode, support] for truncation_radius to be meaningful.
  static Kernel numerical(std::function<double(double)> fn, double support, double mode,
                          Sidedness sidedness, std::string label = "numerical");

  double operator()(double x) const;

  /// Integral of K(x)^z over the real line, Re z > 0.
  Complex integral_pow(Complex z) const;

  double l1_norm() const;
  double l2_norm_sq() const;

  /// (K * K)(t) = integral of K(v - t) K(v) dv. The gamma-exponential closed
  /// form is only available for two-sided kernels.
  double autoconvolution(double t) const;

  /// Largest x >= 0 with K(x) > level, to 1e-10.
  double truncation_radius(double level) const;

  /// max_x K(x) and where it is attained on the positive half-line.
  double max_value() const;
  double mode() const;

  Sidedness sidedness() const { return sidedness_; }
  bool is_gamma_exponential() const { return std::holds_alternative<GammaExp>(shape_); }
  unsigned r() const;
  double rho() const;

  /// Outer radius beyond which K is negligible (below 1e-17 of its maximum)
  /// or zero; integrals over the real line are taken on [-R, R] or [0, R].
  double effective_support() const;

  std::string describe() const;

 private:
  struct GammaExp {
    unsigned r;
    double rho;
    // I1 = I3 = exp(-rho t) * sum_m outer[m] * t^(r - m)
    std::vector<double> outer;
    // I2 = exp(-rho t) * middle * t^(2r + 1)
    double middle;
  };
  struct Numerical {
    std::function<double(double)> fn;
    double support;
    double mode;
    std::string label;
  };

  Kernel(GammaExp g, Sidedness s) : shape_(std::move(g)), sidedness_(s) {}
  Kernel(Numerical n, Sidedness s) : shape_(std::move(n)), sidedness_(s) {}

  std::variant<GammaExp, Numerical> shape_;
  Sidedness sidedness_;
};

}  // namespace levyma
