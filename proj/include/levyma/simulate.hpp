#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "levyma/kernels.hpp"
#include "levyma/levy_models.hpp"

namespace levyma {

enum class JumpSide { Positive, Negative };

struct JumpRecord {
  double time;
  double size;
  JumpSide side;
};

/// Observations Z_{k delta}, k = 1..n. Equality compares the grid step and the
/// observations; seed and provenance are metadata.
struct SamplePath {
  double delta = 1.0;
  std::vector<double> observations;
  std::uint64_t seed = 0;
  double x_max = 0.0;
  std::string provenance;

  std::size_t size() const { return observations.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * delta; }

  friend bool operator==(const SamplePath& a, const SamplePath& b) {
    return a.delta == b.delta && a.observations == b.observations;
  }
};

struct SimulationSpec {
  LevyTriplet model;
  Kernel kernel;
  double delta = 1.0;
  std::size_t n = 1000;
  /// Kernel level alpha defining x_max = max{x : K(x) > alpha}.
  double trunc_level = 0.01;
  /// Explicit x_max; takes precedence over trunc_level when set.
  std::optional<double> x_max;
  std::uint64_t seed = 0;

  double resolved_x_max() const;
};

/// Jumps of the two-sided driver that can reach the observation window:
/// positive-side jumps on (0, n delta + x_max) and negative-side jumps at
/// times -s with s in (0, x_max). Both sides carry positive marks.
std::vector<JumpRecord> simulate_jumps(const SimulationSpec& spec);

/// Truncated moving-average observations of Z_t = int K(t - s) dL_s driven by
/// compound Poisson (standard exponential marks) plus an optional independent
/// Gaussian part with covariance sigma^2 (K*K)(delta (j - k)).
SamplePath simulate_path(const SimulationSpec& spec);

/// Cholesky factor of the banded stationary covariance
/// cov[j] = covariance at lag j (cov.size() - 1 = bandwidth). Returns the
/// factor in band storage: row i holds L(i, i - b .. i).
std::vector<double> banded_cholesky(const std::vector<double>& cov, std::size_t n);

/// CSV with header `k,t,z`, 17 significant digits.
void export_path(const SamplePath& path, const std::filesystem::path& destination);
SamplePath import_path(const std::filesystem::path& source);

}  // namespace levyma
