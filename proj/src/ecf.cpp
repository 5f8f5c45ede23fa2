#include "levyma/ecf.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <string>

#include "levyma/errors.hpp"

namespace levyma {
namespace {

constexpr std::size_t kPairwiseBlock = 128;

struct Sums {
  double c = 0.0;    // sum cos(uz)
  double s = 0.0;    // sum sin(uz)
  double zc = 0.0;   // sum z cos(uz)
  double zs = 0.0;   // sum z sin(uz)
  double zzc = 0.0;  // sum z^2 cos(uz)
  double zzs = 0.0;  // sum z^2 sin(uz)

  Sums& operator+=(const Sums& o) {
    c += o.c;
    s += o.s;
    zc += o.zc;
    zs += o.zs;
    zzc += o.zzc;
    zzs += o.zzs;
    return *this;
  }
};

Sums pairwise(std::span<const double> z, double u) {
  if (z.size() <= kPairwiseBlock) {
    Sums acc;
    for (double x : z) {
      const double co = std::cos(u * x);
      const double si = std::sin(u * x);
      acc.c += co;
      acc.s += si;
      acc.zc += x * co;
      acc.zs += x * si;
      acc.zzc += x * x * co;
      acc.zzs += x * x * si;
    }
    return acc;
  }
  const std::size_t half = z.size() / 2;
  Sums left = pairwise(z.first(half), u);
  left += pairwise(z.subspan(half), u);
  return left;
}

double pairwise_sum(std::span<const double> z, int power) {
  if (z.size() <= kPairwiseBlock) {
    double acc = 0.0;
    for (double x : z) acc += power == 1 ? x : x * x;
    return acc;
  }
  const std::size_t half = z.size() / 2;
  return pairwise_sum(z.first(half), power) + pairwise_sum(z.subspan(half), power);
}

}  // namespace

EmpiricalCf::EmpiricalCf(std::span<const double> observations)
    : z_(observations.begin(), observations.end()) {
  if (z_.empty()) throw InvalidParameter("empirical characteristic function needs observations");
  for (double x : z_) {
    if (!std::isfinite(x)) throw InvalidParameter("observations must be finite");
  }
  const double n = static_cast<double>(z_.size());
  mean_ = pairwise_sum(z_, 1) / n;
  mean_square_ = pairwise_sum(z_, 2) / n;
}

double EmpiricalCf::guard() const {
  const double n = static_cast<double>(z_.size());
  return std::max(std::log(n) / std::sqrt(n), 1e-6);
}

EcfPoint EmpiricalCf::eval(double u) const {
  const Sums s = pairwise(z_, u);
  const double n = static_cast<double>(z_.size());
  EcfPoint p;
  p.u = u;
  p.phi = Complex{s.c, s.s} / n;
  // d/du e^{iuz} = i z e^{iuz}
  p.d1 = Complex{-s.zs, s.zc} / n;
  p.d2 = Complex{-s.zzc, -s.zzs} / n;
  return p;
}

EcfBatch EmpiricalCf::eval_batch(std::span<const double> grid) const {
  EcfBatch batch;
  batch.n = z_.size();
  batch.points.reserve(grid.size());
  for (double u : grid) batch.points.push_back(eval(u));
  return batch;
}

void EcfBatch::check_invariants() const {
  std::map<double, Complex> by_u;
  for (const auto& p : points) {
    if (p.u == 0.0 && p.phi != Complex{1.0, 0.0}) {
      throw Error("ECF invariant violated: Phi_n(0) != 1");
    }
    if (std::abs(p.phi) > 1.0 + 1e-12) {
      throw Error("ECF invariant violated: |Phi_n(" + std::to_string(p.u) + ")| > 1");
    }
    by_u[p.u] = p.phi;
  }
  for (const auto& [u, phi] : by_u) {
    if (u <= 0.0) continue;
    auto mirror = by_u.find(-u);
    if (mirror != by_u.end() && std::abs(mirror->second - std::conj(phi)) > 1e-12) {
      throw Error("ECF invariant violated: Hermitian symmetry at u=" + std::to_string(u));
    }
  }
}

LogCfDerivatives log_cf_derivatives(const EcfPoint& point, double guard, double sigma2_l2) {
  const double modulus = std::abs(point.phi);
  if (!(modulus > guard)) throw SmallDenominator(point.u, modulus, guard);
  const Complex r1 = point.d1 / point.phi;
  const Complex r2 = point.d2 / point.phi;
  return {r1, r2 - r1 * r1 + sigma2_l2};
}

void write_ecf_csv(const EcfBatch& batch, const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw IoError("cannot open " + destination.string() + " for writing");
  out << "u,re_phi,im_phi,re_d1,im_d1,re_d2,im_d2\n" << std::setprecision(17);
  for (const auto& p : batch.points) {
    out << p.u << ',' << p.phi.real() << ',' << p.phi.imag() << ',' << p.d1.real() << ','
        << p.d1.imag() << ',' << p.d2.real() << ',' << p.d2.imag() << '\n';
  }
}

}  // namespace levyma
