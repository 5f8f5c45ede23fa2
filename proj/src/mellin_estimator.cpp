#include "levyma/mellin_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levyma/errors.hpp"
#include "levyma/quadrature.hpp"

namespace levyma {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kMultiplierFloor = 1e-12;

void check_strip(Complex z, const char* what) {
  if (!(z.real() > 0.0 && z.real() < 1.0)) {
    throw DomainError(std::string(what) + " requires Re z in (0, 1)");
  }
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

std::string to_string(LineVariant variant) {
  switch (variant) {
    case LineVariant::SecondDerivative:
      return "second";
    case LineVariant::FirstDerivative:
      return "first";
    case LineVariant::FirstDerivativeStabilized:
      return "first-stab";
  }
  return "unknown";
}

LineVariant parse_line_variant(const std::string& name) {
  if (name == "second") return LineVariant::SecondDerivative;
  if (name == "first") return LineVariant::FirstDerivative;
  if (name == "first-stab") return LineVariant::FirstDerivativeStabilized;
  throw InvalidParameter("unknown estimator variant '" + name + "' (second|first|first-stab)");
}

LineGrid LineGrid::with_default_count(double c, double v_max) {
  const auto k = static_cast<std::size_t>(std::ceil(200.0 * v_max));
  return {c, v_max, std::max<std::size_t>(k, 2)};
}

std::vector<double> LineGrid::nodes() const {
  validate();
  const double delta = step();
  std::vector<double> v(count);
  for (std::size_t k = 0; k < (count + 1) / 2; ++k) {
    v[k] = -v_max + (static_cast<double>(k) + 0.5) * delta;
    v[count - 1 - k] = -v[k];
  }
  if (count % 2 == 1) v[count / 2] = 0.0;
  return v;
}

void LineGrid::validate() const {
  if (!(c > 0.0 && c < 1.0)) throw InvalidParameter("line abscissa c must lie in (0, 1)");
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw InvalidParameter("V must be positive");
  if (count < 2) throw InvalidParameter("line grid needs at least 2 nodes");
}

void MellinLineEstimate::validate() const {
  if (!(c > 0.0 && c < 1.0)) throw InvalidParameter("line abscissa c must lie in (0, 1)");
  if (v.size() < 2 || v.size() != values.size()) {
    throw InvalidParameter("line estimate needs >= 2 nodes with matching values");
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] != -v[v.size() - 1 - k]) throw InvalidParameter("line grid must be symmetric");
    if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag())) {
      throw InvalidParameter("line estimate contains non-finite values");
    }
  }
}

Complex q_factor(const Kernel& kernel, Complex z) {
  check_strip(z, "Q(z)");
  return -gamma(z) * std::exp(kI * (std::numbers::pi * 0.5) * z) * kernel.integral_pow(2.0 - z);
}

Complex q_tilde_factor(const Kernel& kernel, Complex z) {
  check_strip(z, "Q~(z)");
  return kI * gamma(z) * std::exp(kI * (std::numbers::pi * 0.5) * z) *
         kernel.integral_pow(1.0 - z);
}

LogDerivativeSource empirical_source(const EmpiricalCf& ecf, double sigma2_l2) {
  const double guard = ecf.guard();
  return [&ecf, guard, sigma2_l2](double u) {
    auto d = log_cf_derivatives(ecf.eval(u), guard, sigma2_l2);
    d.d1 += sigma2_l2 * u;
    return d;
  };
}

LogDerivativeSource exact_source(const LevyTriplet& model, const Kernel& kernel,
                                 bool remove_gaussian) {
  const double correction = remove_gaussian ? model.sigma2 * kernel.l2_norm_sq() : 0.0;
  return [model, kernel, correction](double u) {
    return LogCfDerivatives{big_psi_d1(model, kernel, u) + correction * u,
                            big_psi_d2(model, kernel, u) + correction};
  };
}

ForwardIntegrator::ForwardIntegrator(const LogDerivativeSource& source, double c, double u_max,
                                     const ForwardQuadrature& quadrature)
    : c_(c), u_max_(u_max) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidParameter("line abscissa c must lie in (0, 1)");
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw InvalidParameter("U must be positive");
  if (quadrature.panels < 1 || quadrature.nodes_per_panel < 1 ||
      !(quadrature.ratio > 0.0 && quadrature.ratio < 1.0) || !(quadrature.max_width > 0.0)) {
    throw InvalidParameter("invalid forward quadrature layout");
  }
  const auto& rule = quad::gauss_legendre(quadrature.nodes_per_panel);
  const double a = 1.0 - c;
  // Panels in t from 0 upwards: [0, r^{P-1}], [r^{P-1}, r^{P-2}], ..., [r, 1].
  std::vector<double> edges{0.0};
  for (std::size_t j = quadrature.panels; j-- > 0;) {
    const double lo = edges.back();
    const double hi = std::pow(quadrature.ratio, static_cast<double>(j));
    const double width = u_max * (std::pow(hi, 1.0 / a) - std::pow(lo, 1.0 / a));
    const auto pieces = static_cast<std::size_t>(std::ceil(width / quadrature.max_width));
    for (std::size_t q = 1; q < pieces; ++q) {
      edges.push_back(lo + (hi - lo) * static_cast<double>(q) / static_cast<double>(pieces));
    }
    edges.push_back(hi);
  }
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p];
    const double hi = edges[p + 1];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = mid + half * rule.nodes[i];
      const double u = u_max * std::pow(t, 1.0 / a);
      if (!(u > 0.0)) continue;
      // du = U / (1 - c) t^{c / (1 - c)} dt
      u_.push_back(u);
      log_u_.push_back(std::log(u));
      weight_.push_back(half * rule.weights[i] * u_max / a * std::pow(t, c / a));
    }
  }
  values_.reserve(u_.size());
  for (double u : u_) values_.push_back(source(u));
}

std::vector<Complex> ForwardIntegrator::transform(
    const LineGrid& grid,
    const std::function<Complex(double, const LogCfDerivatives&)>& integrand) const {
  if (grid.c != c_) throw InvalidParameter("line grid abscissa does not match the integrator");
  const auto v = grid.nodes();
  std::vector<Complex> f(u_.size());
  for (std::size_t j = 0; j < u_.size(); ++j) f[j] = weight_[j] * integrand(u_[j], values_[j]);
  std::vector<Complex> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Complex z{c_, v[k]};
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < u_.size(); ++j) acc += f[j] * std::exp(-z * log_u_[j]);
    out[k] = acc;
  }
  return out;
}

MellinLineEstimate ForwardIntegrator::second(const LineGrid& grid) const {
  MellinLineEstimate line{c_, grid.v_max, grid.nodes(), {}, LineVariant::SecondDerivative};
  line.values = transform(grid, [](double, const LogCfDerivatives& d) { return d.d2; });
  return line;
}

MellinLineEstimate ForwardIntegrator::first(const LineGrid& grid) const {
  MellinLineEstimate line{c_, grid.v_max, grid.nodes(), {}, LineVariant::FirstDerivative};
  line.values = transform(grid, [](double, const LogCfDerivatives& d) { return d.d1; });
  return line;
}

MellinLineEstimate ForwardIntegrator::first_stabilized(const LineGrid& grid, double mean_z,
                                                       const Kernel& kernel,
                                                       std::optional<double> driver_mean) const {
  MellinLineEstimate line{c_, grid.v_max, grid.nodes(), {},
                          LineVariant::FirstDerivativeStabilized};
  line.values = transform(grid, [mean_z](double u, const LogCfDerivatives& d) {
    return d.d1 - kI * mean_z * std::exp(kI * u);
  });
  const double l1 = kernel.l1_norm();
  const double lambda = driver_mean ? *driver_mean : mean_z / l1;
  for (std::size_t k = 0; k < line.v.size(); ++k) {
    // int_0^inf e^{iu} u^{-z} du = Gamma(1 - z) e^{i pi (1 - z) / 2}
    const Complex s = 1.0 - line.z(k);
    line.values[k] += kI * l1 * lambda * gamma(s) * std::exp(kI * (std::numbers::pi * 0.5) * s);
  }
  return line;
}

MellinLineEstimate forward_mellin_second(const LogDerivativeSource& source, double u_max,
                                         const LineGrid& grid,
                                         const ForwardQuadrature& quadrature) {
  grid.validate();
  return ForwardIntegrator(source, grid.c, u_max, quadrature).second(grid);
}

MellinLineEstimate forward_mellin_first(const LogDerivativeSource& source, double mean_z,
                                        const Kernel& kernel, double u_max,
                                        const LineGrid& grid,
                                        const FirstDerivativeOptions& options) {
  grid.validate();
  const ForwardIntegrator integrator(source, grid.c, u_max, options.quadrature);
  if (options.stabilized) {
    return integrator.first_stabilized(grid, mean_z, kernel, options.driver_mean);
  }
  return integrator.first(grid);
}

DensityEstimate inverse_mellin(const MellinLineEstimate& line, const Kernel& kernel,
                               std::span<const double> x_grid) {
  line.validate();
  const bool second = line.variant == LineVariant::SecondDerivative;
  std::vector<Complex> ratio(line.v.size());
  for (std::size_t k = 0; k < line.v.size(); ++k) {
    const Complex w = 1.0 - line.z(k);
    const Complex q = second ? q_factor(kernel, w) : q_tilde_factor(kernel, w);
    // Gamma and the exponential factor have no zeros, they only decay in v;
    // the kernel integral is the factor that can vanish.
    const Complex kernel_factor = kernel.integral_pow((second ? 2.0 : 1.0) - w);
    if (std::abs(kernel_factor) < kMultiplierFloor || q == Complex{} || !std::isfinite(std::abs(q))) {
      throw DomainError("Mellin multiplier vanishes at v=" + std::to_string(line.v[k]));
    }
    ratio[k] = line.values[k] / q;
  }

  DensityEstimate est;
  est.target = second ? DensityTarget::NuBar : DensityTarget::Nu;
  est.x.assign(x_grid.begin(), x_grid.end());
  est.values.resize(est.x.size());
  const double scale = line.step() / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < est.x.size(); ++i) {
    const double x = est.x[i];
    if (!(x > 0.0)) throw DomainError("inverse Mellin transform requires x > 0");
    if (i > 0 && !(x > est.x[i - 1])) throw InvalidParameter("x-grid must be strictly increasing");
    const double log_x = std::log(x);
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < ratio.size(); ++k) acc += ratio[k] * std::exp(-line.z(k) * log_x);
    acc *= second ? scale : scale / x;
    est.values[i] = acc.real();
    if (acc.real() != 0.0 || acc.imag() != 0.0) {
      est.max_imag_residue = std::max(
          est.max_imag_residue, std::abs(acc.imag()) / std::max(std::abs(acc.real()), 1e-300));
    }
  }
  est.provenance["variant"] = to_string(line.variant);
  est.provenance["c"] = format_double(line.c);
  est.provenance["V"] = format_double(line.v_max);
  est.provenance["K"] = std::to_string(line.v.size());
  est.provenance["kernel"] = kernel.describe();
  return est;
}

WeightFunction uniform_weight() {
  return [](double t) { return (t >= 1.0 && t <= 2.0) ? 1.0 : 0.0; };
}

double estimate_sigma2(const LogDerivativeSource& raw_source, const Kernel& kernel,
                       const WeightFunction& weight, double u_n, std::size_t nodes) {
  if (!(u_n > 0.0) || !std::isfinite(u_n)) throw InvalidParameter("U_n must be positive");
  const auto& rule = quad::gauss_legendre(nodes);
  // u = U (1.5 + 0.5 s), du = U/2 ds; w_n(u) du = w(1.5 + 0.5 s) ds / 2
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 1.5 + 0.5 * rule.nodes[i];
    const double w = weight(t);
    if (w == 0.0) continue;
    acc += 0.5 * rule.weights[i] * w * raw_source(u_n * t).d2.real();
  }
  return -acc / kernel.l2_norm_sq();
}

LineGrid EstimatorConfig::line_grid() const {
  if (k_points) return {c, v_max, *k_points};
  return LineGrid::with_default_count(c, v_max);
}

void EstimatorConfig::validate() const {
  line_grid().validate();
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw InvalidParameter("U must be positive");
  if (!(sigma2 >= 0.0)) throw InvalidParameter("sigma^2 must be >= 0");
  if (estimate_sigma2 && !(sigma_u > 0.0)) throw InvalidParameter("sigma U must be positive");
}

DensityEstimate estimate_levy_density(const SamplePath& path, const Kernel& kernel,
                                      const EstimatorConfig& config,
                                      std::span<const double> x_grid) {
  config.validate();
  const EmpiricalCf ecf(path.observations);
  const double l2 = kernel.l2_norm_sq();

  double sigma2 = config.sigma2;
  std::optional<double> sigma2_raw;
  if (config.estimate_sigma2) {
    sigma2_raw = estimate_sigma2(empirical_source(ecf, 0.0), kernel, uniform_weight(),
                                 config.sigma_u);
    sigma2 = std::max(0.0, *sigma2_raw);
  }

  const auto grid = config.line_grid();
  const ForwardIntegrator integrator(empirical_source(ecf, sigma2 * l2), config.c, config.u_max,
                                     config.quadrature);
  MellinLineEstimate line;
  switch (config.variant) {
    case LineVariant::SecondDerivative:
      line = integrator.second(grid);
      break;
    case LineVariant::FirstDerivative:
      line = integrator.first(grid);
      break;
    case LineVariant::FirstDerivativeStabilized:
      line = integrator.first_stabilized(grid, ecf.mean(), kernel, config.driver_mean);
      break;
  }
  auto est = inverse_mellin(line, kernel, x_grid);
  est.provenance["U"] = format_double(config.u_max);
  est.provenance["n"] = std::to_string(path.size());
  est.provenance["delta"] = format_double(path.delta);
  est.provenance["sigma2"] = format_double(sigma2);
  if (sigma2_raw) est.provenance["sigma2_raw"] = format_double(*sigma2_raw);
  est.provenance["quadrature"] = std::to_string(config.quadrature.panels) + "x" +
                                 std::to_string(config.quadrature.nodes_per_panel) + ";ratio=" +
                                 format_double(config.quadrature.ratio) + ";width=" +
                                 format_double(config.quadrature.max_width);
  if (config.driver_mean) est.provenance["driver_mean"] = format_double(*config.driver_mean);
  return est;
}

std::vector<double> uniform_grid(double start, double stop, std::size_t count) {
  if (count < 2 || !(stop > start)) throw InvalidParameter("uniform grid needs count >= 2, stop > start");
  std::vector<double> g(count);
  const double h = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = start + h * static_cast<double>(i);
  g.back() = stop;
  return g;
}

}  // namespace levyma
