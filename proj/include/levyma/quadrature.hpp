#pragma once

// Numerical integration used across the library: a globally adaptive
// Gauss-Kronrod (7/15) integrator templated on the value type, and
// Gauss-Legendre rules for fixed-node composite sums.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "levyma/errors.hpp"

namespace levyma::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [-1, 1]. Rules are cached; thread-safe.
const Rule& gauss_legendre(std::size_t m);

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-12;
  std::size_t max_intervals = 2000;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class T, class F>
Segment<T> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) {
      gauss += (f1 + f2) * kWg[j / 2];
    }
  }
  const T value = kronrod * half;
  const double error = magnitude((kronrod - gauss) * half);
  return {a, b, value, error};
}

}  // namespace detail

/// Adaptive integral of f over [a, b]. `f` returns double or complex<double>.
/// Optional interior breakpoints, in any order, seed the initial partition.
template <class F>
auto integrate(F f, double a, double b, const Tolerance& tol = {},
               std::span<const double> breakpoints = {}) -> decltype(f(a)) {
  using T = decltype(f(a));
  if (!(a < b)) {
    if (a == b) return T{};
    return -integrate(f, b, a, tol, breakpoints);
  }
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment<T>> heap;
  T total{};
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto seg = detail::kronrod15<T>(f, cuts[i], cuts[i + 1]);
    total += seg.value;
    total_error += seg.error;
    heap.push(seg);
  }
  std::size_t intervals = heap.size();
  while (total_error > std::max(tol.abs, tol.rel * detail::magnitude(total))) {
    if (intervals >= tol.max_intervals) {
      throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) +
                            ", " + std::to_string(b) + "], error estimate " +
                            std::to_string(total_error));
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature: interval exhausted at " +
                            std::to_string(worst.a));
    }
    auto left = detail::kronrod15<T>(f, worst.a, mid);
    auto right = detail::kronrod15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  if (!std::isfinite(detail::magnitude(total))) {
    throw QuadratureError("adaptive quadrature produced a non-finite value");
  }
  return total;
}

/// Integral over [a, inf) via x = a + t / (1 - t).
template <class F>
auto integrate_to_infinity(F f, double a, const Tolerance& tol = {}) -> decltype(f(a)) {
  auto mapped = [&](double t) -> decltype(f(a)) {
    if (t >= 1.0) return {};
    const double s = 1.0 - t;
    return f(a + t / s) * (1.0 / (s * s));
  };
  return integrate(mapped, 0.0, 1.0, tol);
}

}  // namespace levyma::quad
