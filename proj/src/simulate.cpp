#include "levyma/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "levyma/errors.hpp"
#include "levyma/rng.hpp"

namespace levyma {
namespace {

// Lags whose covariance falls below this fraction of the variance are dropped,
// which makes the covariance matrix (and its Cholesky factor) banded.
constexpr double kCovarianceCutoff = 1e-16;

void validate(const SimulationSpec& spec) {
  spec.model.validate();
  if (spec.model.jumps.family == JumpFamily::TemperedStable) {
    throw InvalidParameter("path simulation supports compound Poisson drivers only");
  }
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta)) {
    throw InvalidParameter("grid step delta must be positive");
  }
  if (spec.n < 1) throw InvalidParameter("number of observations must be >= 1");
  if (spec.x_max && !(*spec.x_max > 0.0)) throw InvalidParameter("x_max must be positive");
}

std::vector<double> gaussian_component(const SimulationSpec& spec) {
  const double var = spec.model.sigma2 * spec.kernel.autoconvolution(0.0);
  std::vector<double> cov{var};
  for (std::size_t lag = 1; lag < spec.n; ++lag) {
    const double c = spec.model.sigma2 * spec.kernel.autoconvolution(spec.delta * lag);
    if (std::abs(c) <= kCovarianceCutoff * var) break;
    cov.push_back(c);
  }
  const std::size_t b = cov.size() - 1;
  const auto factor = banded_cholesky(cov, spec.n);

  auto rng = make_stream(spec.seed, Stream::Gaussian);
  std::normal_distribution<double> normal;
  std::vector<double> eps(spec.n);
  for (auto& e : eps) e = normal(rng);

  std::vector<double> out(spec.n, 0.0);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t j0 = i >= b ? i - b : 0;
    double acc = 0.0;
    for (std::size_t j = j0; j <= i; ++j) {
      acc += factor[i * (b + 1) + (j + b - i)] * eps[j];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

double SimulationSpec::resolved_x_max() const {
  if (x_max) return *x_max;
  return kernel.truncation_radius(trunc_level);
}

std::vector<double> banded_cholesky(const std::vector<double>& cov, std::size_t n) {
  if (cov.empty()) throw InvalidParameter("banded_cholesky: empty covariance");
  const std::size_t b = cov.size() - 1;
  const std::size_t width = b + 1;
  // L(i, j) stored at i * width + (j + b - i) for i - b <= j <= i.
  std::vector<double> l(n * width, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return l[i * width + (j + b - i)]; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i >= b ? i - b : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      double s = cov[i - j];
      const std::size_t k0 = std::max(j0, j >= b ? j - b : 0);
      for (std::size_t k = k0; k < j; ++k) s -= at(i, k) * at(j, k);
      if (i == j) {
        if (!(s > 0.0)) {
          throw NotPositiveDefinite("covariance matrix is not positive definite at row " +
                                    std::to_string(i));
        }
        at(i, i) = std::sqrt(s);
      } else {
        at(i, j) = s / at(j, j);
      }
    }
  }
  return l;
}

std::vector<JumpRecord> simulate_jumps(const SimulationSpec& spec) {
  validate(spec);
  std::vector<JumpRecord> jumps;
  if (spec.model.jumps.family != JumpFamily::ExponentialCpp) return jumps;

  const double lambda = spec.model.jumps.intensity;
  const double x_max = spec.resolved_x_max();
  const double horizon = static_cast<double>(spec.n) * spec.delta + x_max;

  auto positive = make_stream(spec.seed, Stream::PositiveJumpTimes);
  auto negative = make_stream(spec.seed, Stream::NegativeJumpTimes);
  auto positive_sizes = make_stream(spec.seed, Stream::PositiveJumpSizes);
  auto negative_sizes = make_stream(spec.seed, Stream::NegativeJumpSizes);
  std::exponential_distribution<double> gap(lambda);
  std::exponential_distribution<double> mark(1.0);

  // Each side has its own time and mark streams, so changing n or x_max
  // only appends jumps to the existing ones.
  for (double s = gap(negative); s < x_max; s += gap(negative)) {
    jumps.push_back({-s, mark(negative_sizes), JumpSide::Negative});
  }
  for (double s = gap(positive); s < horizon; s += gap(positive)) {
    jumps.push_back({s, mark(positive_sizes), JumpSide::Positive});
  }
  return jumps;
}

SamplePath simulate_path(const SimulationSpec& spec) {
  validate(spec);
  const double x_max = spec.resolved_x_max();
  const double delta = spec.delta;
  const auto n = static_cast<std::ptrdiff_t>(spec.n);

  SamplePath path;
  path.delta = delta;
  path.seed = spec.seed;
  path.x_max = x_max;
  path.observations.assign(spec.n, 0.0);
  {
    std::ostringstream prov;
    prov << "model=" << spec.model.describe() << ",kernel=" << spec.kernel.describe()
         << ",delta=" << delta << ",x_max=" << std::setprecision(10) << x_max
         << ",seed=" << spec.seed;
    path.provenance = prov.str();
  }

  // Each jump at time s feeds the observations t = k delta with |t - s| < x_max.
  for (const auto& jump : simulate_jumps(spec)) {
    const auto first = std::max<std::ptrdiff_t>(
        1, static_cast<std::ptrdiff_t>(std::floor((jump.time - x_max) / delta)) + 1);
    const auto last = std::min<std::ptrdiff_t>(
        n, static_cast<std::ptrdiff_t>(std::ceil((jump.time + x_max) / delta)) - 1);
    for (auto k = first; k <= last; ++k) {
      const double lag = static_cast<double>(k) * delta - jump.time;
      if (std::abs(lag) < x_max) {
        path.observations[static_cast<std::size_t>(k - 1)] += spec.kernel(lag) * jump.size;
      }
    }
  }

  if (spec.model.drift != 0.0) {
    const double shift = spec.model.drift * spec.kernel.l1_norm();
    for (auto& z : path.observations) z += shift;
  }
  if (spec.model.sigma2 > 0.0) {
    const auto gaussian = gaussian_component(spec);
    for (std::size_t k = 0; k < spec.n; ++k) path.observations[k] += gaussian[k];
  }
  return path;
}

void export_path(const SamplePath& path, const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw IoError("cannot open " + destination.string() + " for writing");
  out << "k,t,z\n" << std::setprecision(17);
  for (std::size_t k = 1; k <= path.size(); ++k) {
    out << k << ',' << path.time(k) << ',' << path.observations[k - 1] << '\n';
  }
  if (!out) throw IoError("failed writing " + destination.string());
}

SamplePath import_path(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw IoError("cannot open " + source.string());
  std::string line;
  if (!std::getline(in, line) || line != "k,t,z") {
    throw IoError(source.string() + ": expected header 'k,t,z'");
  }
  SamplePath path;
  std::size_t expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t k = 0;
    double t = 0.0;
    double z = 0.0;
    char c1 = 0;
    char c2 = 0;
    if (!(row >> k >> c1 >> t >> c2 >> z) || c1 != ',' || c2 != ',') {
      throw IoError(source.string() + ": malformed row '" + line + "'");
    }
    if (k != expected) throw IoError(source.string() + ": rows must be numbered 1..n");
    if (k == 1) path.delta = t;
    path.observations.push_back(z);
    ++expected;
  }
  if (path.observations.empty()) throw IoError(source.string() + ": no observations");
  if (!(path.delta > 0.0)) throw IoError(source.string() + ": non-positive grid step");
  return path;
}

}  // namespace levyma
