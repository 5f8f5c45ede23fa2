#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "levyma/special_functions.hpp"

namespace levyma {

/// Phi_n(u) = mean exp(i u Z) and its exact u-derivatives
/// Phi_n'(u) = mean(i Z e^{iuZ}), Phi_n''(u) = mean(-Z^2 e^{iuZ}).
struct EcfPoint {
  double u = 0.0;
  Complex phi;
  Complex d1;
  Complex d2;
};

struct EcfBatch {
  std::size_t n = 0;
  std::vector<EcfPoint> points;

  /// Phi_n(0) = 1, |Phi_n| <= 1 + 1e-12 and Hermitian symmetry for mirrored
  /// grid points. Throws levyma::Error naming the first violation.
  void check_invariants() const;
};

class EmpiricalCf {
 public:
  explicit EmpiricalCf(std::span<const double> observations);

  /// Single pass over the sample with pairwise summation; the result does not
  /// depend on which other grid points are evaluated.
  EcfPoint eval(double u) const;
  EcfBatch eval_batch(std::span<const double> grid) const;

  std::size_t size() const { return z_.size(); }
  double mean() const { return mean_; }
  double mean_square() const { return mean_square_; }

  /// Denominator guard max(log(n) / sqrt(n), 1e-6).
  double guard() const;

 private:
  std::vector<double> z_;
  double mean_ = 0.0;
  double mean_square_ = 0.0;
};

/// Psi_n'(u) = Phi_n'/Phi_n and
/// Psi_{sigma,n}''(u) = Phi_n''/Phi_n - (Phi_n'/Phi_n)^2 + sigma2_l2,
/// where sigma2_l2 = sigma^2 * ||K||_2^2.
struct LogCfDerivatives {
  Complex d1;
  Complex d2;
};

/// Throws SmallDenominator when |Phi_n(u)| <= guard.
LogCfDerivatives log_cf_derivatives(const EcfPoint& point, double guard, double sigma2_l2 = 0.0);

/// Diagnostic dump: u,re_phi,im_phi,re_d1,im_d1,re_d2,im_d2.
void write_ecf_csv(const EcfBatch& batch, const std::filesystem::path& destination);

}  // namespace levyma
