#pragma once

// Mellin-transform deconvolution of the Levy density of the driver of a
// moving-average process observed on an equidistant grid.
//
// Forward step: Mellin transform of the (empirical) log characteristic
// function derivatives along z = c + i v, truncated at u <= U.
// Inverse step: division by the kernel multiplier Q (second derivative) or
// Q~ (first derivative) and a Riemann sum of the inverse Mellin integral over
// |v| <= V.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levyma/ecf.hpp"
#include "levyma/kernels.hpp"
#include "levyma/levy_models.hpp"
#include "levyma/simulate.hpp"
#include "levyma/special_functions.hpp"

namespace levyma {

enum class LineVariant { SecondDerivative, FirstDerivative, FirstDerivativeStabilized };

std::string to_string(LineVariant variant);
LineVariant parse_line_variant(const std::string& name);  // second | first | first-stab

/// Midpoint grid v_k = -V + (k + 1/2) * delta, delta = 2V / K, k = 0..K-1.
struct LineGrid {
  double c = 0.5;
  double v_max = 1.0;
  std::size_t count = 200;

  /// Default node count ceil(200 V).
  static LineGrid with_default_count(double c, double v_max);

  double step() const { return 2.0 * v_max / static_cast<double>(count); }
  std::vector<double> nodes() const;
  void validate() const;
};

/// Values of M_n[Psi^(d)](1 - z) at z_k = c + i v_k.
struct MellinLineEstimate {
  double c = 0.5;
  double v_max = 1.0;
  std::vector<double> v;
  std::vector<Complex> values;
  LineVariant variant = LineVariant::SecondDerivative;

  double step() const { return 2.0 * v_max / static_cast<double>(v.size()); }
  Complex z(std::size_t k) const { return {c, v[k]}; }
  void validate() const;
};

enum class DensityTarget { NuBar, Nu };

struct DensityEstimate {
  std::vector<double> x;
  std::vector<double> values;
  DensityTarget target = DensityTarget::NuBar;
  /// Largest |Im| / |Re| of the inverse sums before taking real parts.
  double max_imag_residue = 0.0;
  std::map<std::string, std::string> provenance;
};

/// Q(z) = -Gamma(z) e^{i pi z / 2} int K^{2 - z}, Re z in (0, 1).
Complex q_factor(const Kernel& kernel, Complex z);
/// Q~(z) = i Gamma(z) e^{i pi z / 2} int K^{1 - z}, Re z in (0, 1).
Complex q_tilde_factor(const Kernel& kernel, Complex z);

/// Derivatives of Psi_sigma at u > 0: d1 = Psi_sigma'(u), d2 = Psi_sigma''(u).
using LogDerivativeSource = std::function<LogCfDerivatives(double u)>;

/// Empirical source; keeps a reference to `ecf`. sigma2_l2 = sigma^2 ||K||_2^2 is added as
/// sigma2_l2 * u to d1 and sigma2_l2 to d2. Applies the denominator guard.
LogDerivativeSource empirical_source(const EmpiricalCf& ecf, double sigma2_l2 = 0.0);

/// Exact source from the model, by quadrature of Psi' and Psi''. With
/// `remove_gaussian` the sigma^2 contribution is cancelled (Psi_sigma).
LogDerivativeSource exact_source(const LevyTriplet& model, const Kernel& kernel,
                                 bool remove_gaussian = true);

/// Layout of the forward quadrature in t, where u = U t^{1/(1-c)}: geometric
/// panels [ratio^{j+1}, ratio^j] (the last one reaching 0), each with a
/// Gauss-Legendre rule. The substitution removes the u^{-c} endpoint
/// singularity. Panels wider than `max_width` in u are split evenly in t so
/// that oscillating integrands (e^{iu}, or the ECF at large U) stay resolved.
struct ForwardQuadrature {
  std::size_t panels = 32;
  std::size_t nodes_per_panel = 8;
  double ratio = 0.5;
  double max_width = 0.5;
};

/// Samples of a source on the forward quadrature nodes for one (c, U).
/// Reused for every line grid with the same c.
class ForwardIntegrator {
 public:
  ForwardIntegrator(const LogDerivativeSource& source, double c, double u_max,
                    const ForwardQuadrature& quadrature = {});

  double c() const { return c_; }
  double u_max() const { return u_max_; }
  std::size_t size() const { return log_u_.size(); }

  /// int_0^U Psi_sigma''(u) u^{-z} du on the grid.
  MellinLineEstimate second(const LineGrid& grid) const;

  /// int_0^U Psi_sigma'(u) u^{-z} du on the grid.
  MellinLineEstimate first(const LineGrid& grid) const;

  /// int_0^U [Psi'(u) - i mean_z e^{iu}] u^{-z} du
  ///   + i ||K||_1 lambda Gamma(1 - z) e^{i pi (1 - z) / 2},
  /// with lambda = driver_mean if given, else mean_z / ||K||_1.
  MellinLineEstimate first_stabilized(const LineGrid& grid, double mean_z, const Kernel& kernel,
                                      std::optional<double> driver_mean = std::nullopt) const;

  /// Generic: int_0^U g(u, Psi', Psi'') u^{-z} du.
  std::vector<Complex> transform(
      const LineGrid& grid,
      const std::function<Complex(double u, const LogCfDerivatives&)>& integrand) const;

 private:
  double c_;
  double u_max_;
  std::vector<double> u_;
  std::vector<double> log_u_;
  std::vector<double> weight_;
  std::vector<LogCfDerivatives> values_;
};

MellinLineEstimate forward_mellin_second(const LogDerivativeSource& source, double u_max,
                                         const LineGrid& grid,
                                         const ForwardQuadrature& quadrature = {});

struct FirstDerivativeOptions {
  bool stabilized = true;
  /// True mean of the unit-time driver increment (lambda for standard
  /// exponential marks). When unset the stabiliser uses mean(Z) / ||K||_1.
  std::optional<double> driver_mean;
  ForwardQuadrature quadrature;
};

MellinLineEstimate forward_mellin_first(const LogDerivativeSource& source, double mean_z,
                                        const Kernel& kernel, double u_max,
                                        const LineGrid& grid,
                                        const FirstDerivativeOptions& options = {});

/// Regularised inverse Mellin transform on the stored grid:
///   SecondDerivative: nu_bar(x) = delta/(2 pi) sum_k Re{line_k / Q(1 - z_k) x^{-z_k}}
///   FirstDerivative*: nu(x) = delta/(2 pi x) sum_k Re{line_k / Q~(1 - z_k) x^{-z_k}}
DensityEstimate inverse_mellin(const MellinLineEstimate& line, const Kernel& kernel,
                               std::span<const double> x_grid);

using WeightFunction = std::function<double(double)>;

/// Uniform density on [1, 2].
WeightFunction uniform_weight();

/// sigma^2 estimate from -(1/||K||_2^2) Re int w_n(u) Psi''(u) du with
/// w_n(u) = w(u/U)/U on [U, 2U]. `raw_source` must not include the sigma
/// correction (d2 = Phi''/Phi - (Phi'/Phi)^2). Gauss-Legendre with `nodes`.
double estimate_sigma2(const LogDerivativeSource& raw_source, const Kernel& kernel,
                       const WeightFunction& weight, double u_n, std::size_t nodes = 64);

struct EstimatorConfig {
  LineVariant variant = LineVariant::FirstDerivativeStabilized;
  double c = 0.5;
  double u_max = 0.4;
  double v_max = 1.1;
  /// Defaults to ceil(200 V).
  std::optional<std::size_t> k_points;
  /// Known sigma^2, ignored when estimate_sigma2 is set.
  double sigma2 = 0.0;
  bool estimate_sigma2 = false;
  double sigma_u = 1.0;
  std::optional<double> driver_mean;
  ForwardQuadrature quadrature;

  LineGrid line_grid() const;
  void validate() const;
};

/// ecf -> forward Mellin -> inverse Mellin. Tuning parameters are recorded in
/// the result's provenance.
DensityEstimate estimate_levy_density(const SamplePath& path, const Kernel& kernel,
                                      const EstimatorConfig& config,
                                      std::span<const double> x_grid);

/// Uniform grid of `count` points on [start, stop].
std::vector<double> uniform_grid(double start, double stop, std::size_t count);

}  // namespace levyma
