#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levyma/kernels.hpp"
#include "levyma/levy_models.hpp"
#include "levyma/mellin_estimator.hpp"

namespace levyma {

enum class FailurePolicy { Abort, SkipAndFlag };

struct TuningGrid {
  std::vector<double> u;
  std::vector<double> v;
};

/// Monte Carlo study: for each n and each (U, V) of its tuning grid, `runs`
/// independent simulate -> estimate -> risk pipelines.
///
/// Seeds: reporting runs use base_seed + i, i < runs. Tuning runs use
/// base_seed + tuning_seed_offset + i, i < tuning_runs, unless
/// paper_faithful is set, in which case tuning reuses the reporting seeds.
struct StudyConfig {
  double lambda = 1.0;
  double sigma2 = 0.0;
  unsigned kernel_r = 0;
  double kernel_rho = 1.0;
  Sidedness sidedness = Sidedness::TwoSided;
  /// Sampling step.
  double delta = 1.0;
  std::vector<std::size_t> n_list{1000, 5000, 10000, 20000};
  std::size_t runs = 20;

  LineVariant variant = LineVariant::FirstDerivativeStabilized;
  double c = 0.5;
  std::optional<std::size_t> k_points;
  /// Stabiliser uses the true lambda instead of mean(Z) / ||K||_1.
  bool use_true_lambda = false;
  ForwardQuadrature quadrature;

  TuningGrid grid{{0.3, 0.4, 0.5}, {1.1, 1.2, 1.3}};
  std::map<std::size_t, TuningGrid> per_n;

  double trunc_level = 0.01;
  std::optional<double> x_max;

  std::uint64_t base_seed = 1;
  std::uint64_t tuning_seed_offset = 1'000'000;
  std::optional<std::size_t> tuning_runs;
  bool paper_faithful = false;

  double risk_a = 1.0;
  double risk_b = 3.0;
  std::size_t risk_points = 257;

  /// Decay exponent of the analytic-continuation assumption; recorded only.
  std::optional<double> mellin_decay_gamma;

  FailurePolicy failure_policy = FailurePolicy::Abort;
  /// 0 = hardware concurrency, overridden by LEVYMA_THREADS.
  std::size_t threads = 0;

  Kernel kernel() const;
  LevyTriplet model() const;
  const TuningGrid& grid_for(std::size_t n) const;
  std::vector<std::uint64_t> reporting_seeds() const;
  std::vector<std::uint64_t> tuning_seeds() const;
  std::vector<double> risk_grid() const;
  void validate() const;
};

StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::filesystem::path& path);

struct RiskCell {
  std::size_t n = 0;
  double u = 0.0;
  double v = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> risks;  // NaN for failed runs under SkipAndFlag
  std::size_t failures = 0;
  double wall_seconds = 0.0;
};

struct RiskReport {
  std::vector<RiskCell> cells;
  std::string provenance;
};

/// Integral over [a, b] of (estimate - truth)^2, truth being nu or x^2 nu
/// according to the estimate's target. Simpson on a uniform grid with an even
/// number of intervals, trapezoid otherwise. The grid restricted to [a, b]
/// must start at a, end at b and hold at least 64 points.
double risk_l2(const DensityEstimate& estimate, const JumpDensity& truth, double a, double b);

/// Runs every (n, U, V) cell on the reporting seeds.
RiskReport run_study(const StudyConfig& config);

struct TunedPair {
  std::size_t n = 0;
  double u = 0.0;
  double v = 0.0;
  double tuning_mean_risk = 0.0;
};

/// Grid search of the mean risk over the tuning seeds. Ties go to the smaller
/// U, then the smaller V.
std::vector<TunedPair> tune_parameters(const StudyConfig& config);

/// Evaluates the given cells for one n on the given seeds.
std::vector<RiskCell> evaluate_cells(const StudyConfig& config, std::size_t n,
                                     const TuningGrid& grid,
                                     const std::vector<std::uint64_t>& seeds);

/// CSV `n,U,V,mean_risk,var_risk`.
void emit_table(const RiskReport& report, const std::filesystem::path& destination);
RiskReport read_table(const std::filesystem::path& source);

/// CSV `x,nu_hat,nu_true`.
void emit_plotdata(const DensityEstimate& estimate, const JumpDensity& truth,
                   const std::filesystem::path& destination);

std::size_t resolve_thread_count(std::size_t configured);

}  // namespace levyma
