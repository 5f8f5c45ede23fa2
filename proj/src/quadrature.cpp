#include "levyma/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace levyma::quad {
namespace {

Rule build_rule(std::size_t m) {
  Rule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    // Tricomi initial guess, refined by Newton on P_m.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(std::size_t m) {
  static std::mutex mutex;
  static std::map<std::size_t, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) {
    if (m == 0) throw InvalidParameter("Gauss-Legendre rule needs at least one node");
    it = cache.emplace(m, build_rule(m)).first;
  }
  return it->second;
}

}  // namespace levyma::quad
