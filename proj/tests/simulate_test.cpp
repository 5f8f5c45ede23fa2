#include "levyma/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "levyma/errors.hpp"

namespace {

using levyma::JumpDensity;
using levyma::Kernel;
using levyma::LevyTriplet;
using levyma::SimulationSpec;

SimulationSpec base_spec(std::size_t n, std::uint64_t seed, double lambda = 1.0,
                         double sigma2 = 0.0) {
  LevyTriplet m;
  m.sigma2 = sigma2;
  m.jumps = lambda > 0.0 ? JumpDensity::exponential_cpp(lambda) : JumpDensity::none();
  SimulationSpec spec{m, Kernel::gamma_exponential(0, 1.0)};
  spec.n = n;
  spec.seed = seed;
  return spec;
}

double mean_of(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  return std::accumulate(x.begin() + lo, x.begin() + hi, 0.0) / static_cast<double>(hi - lo);
}

double var_of(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  const double m = mean_of(x, lo, hi);
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += (x[i] - m) * (x[i] - m);
  return s / static_cast<double>(hi - lo - 1);
}

// Standard error of a statistic from non-overlapping batch means.
template <class Stat>
double batch_se(const std::vector<double>& x, std::size_t lo, std::size_t hi, std::size_t batches,
                Stat stat) {
  const std::size_t len = (hi - lo) / batches;
  std::vector<double> values;
  for (std::size_t b = 0; b < batches; ++b) values.push_back(stat(x, lo + b * len, lo + (b + 1) * len));
  return std::sqrt(var_of(values, 0, values.size()) / static_cast<double>(batches));
}

// sum over all integer lags h of Cov(Z_0, Z_h) for lambda = 1, K = e^{-|x|}:
// 2 (K*K)(h) = 2 e^{-|h|} (1 + |h|).
double long_run_variance() {
  double s = 2.0;
  for (int h = 1; h < 200; ++h) s += 2.0 * 2.0 * std::exp(-h) * (1.0 + h);
  return s;
}

TEST(SimulatePath, NoJumpsNoGaussianIsZero) {
  const auto path = levyma::simulate_path(base_spec(500, 3, 0.0, 0.0));
  ASSERT_EQ(path.size(), 500u);
  for (double z : path.observations) EXPECT_EQ(z, 0.0);
}

TEST(SimulatePath, Deterministic) {
  const auto a = levyma::simulate_path(base_spec(3000, 77, 1.0, 0.5));
  const auto b = levyma::simulate_path(base_spec(3000, 77, 1.0, 0.5));
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.observations, b.observations);
  const auto c = levyma::simulate_path(base_spec(3000, 78, 1.0, 0.5));
  EXPECT_FALSE(a == c);
}

TEST(SimulatePath, PrefixIndependentOfLaterObservations) {
  // A longer path extends a shorter one with the same seed.
  const auto shorter = levyma::simulate_path(base_spec(200, 5));
  const auto longer = levyma::simulate_path(base_spec(400, 5));
  for (std::size_t k = 0; k < 200; ++k) {
    EXPECT_NEAR(shorter.observations[k], longer.observations[k], 1e-12) << k;
  }
}

TEST(SimulatePath, MomentsMatchStationaryLaw) {
  const std::size_t n = 100000;
  const auto path = levyma::simulate_path(base_spec(n, 2024));
  const auto& z = path.observations;
  const double mean = mean_of(z, 0, n);
  const double se_mean = std::sqrt(long_run_variance() / static_cast<double>(n));
  EXPECT_NEAR(mean, 2.0, 5.0 * se_mean);
  const double var = var_of(z, 0, n);
  const double se_var = batch_se(z, 0, n, 100, var_of);
  // Truncation at x_max = ln 100 removes a little variance: 2 (1 - alpha^2).
  EXPECT_NEAR(var, 2.0, 5.0 * se_var);
}

TEST(SimulatePath, Stationarity) {
  const std::size_t n = 100000;
  const auto path = levyma::simulate_path(base_spec(n, 99));
  const auto& z = path.observations;
  const std::size_t h = n / 2;
  const double d_mean = mean_of(z, 0, h) - mean_of(z, h, n);
  const double se_mean = std::hypot(batch_se(z, 0, h, 50, mean_of), batch_se(z, h, n, 50, mean_of));
  EXPECT_LT(std::abs(d_mean), 4.0 * se_mean);
  const double d_var = var_of(z, 0, h) - var_of(z, h, n);
  const double se_var = std::hypot(batch_se(z, 0, h, 50, var_of), batch_se(z, h, n, 50, var_of));
  EXPECT_LT(std::abs(d_var), 4.0 * se_var);
}

TEST(SimulatePath, TruncationSanity) {
  auto spec = base_spec(20000, 17);
  spec.trunc_level = 0.01;
  const auto coarse = levyma::simulate_path(spec);
  spec.trunc_level = 0.0001;
  const auto fine = levyma::simulate_path(spec);
  EXPECT_NEAR(fine.x_max, 2.0 * coarse.x_max, 1e-9);
  double diff = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    diff += std::abs(fine.observations[k] - coarse.observations[k]);
  }
  EXPECT_LT(diff / static_cast<double>(coarse.size()), 0.05);
}

TEST(SimulatePath, ExplicitXMaxOverridesLevel) {
  auto spec = base_spec(100, 4);
  spec.x_max = 6.908;
  const auto path = levyma::simulate_path(spec);
  EXPECT_DOUBLE_EQ(path.x_max, 6.908);
  spec.x_max.reset();
  EXPECT_NEAR(spec.resolved_x_max(), std::log(100.0), 1e-10);
}

TEST(SimulatePath, GaussianComponentCovariance) {
  const std::size_t n = 40000;
  const auto path = levyma::simulate_path(base_spec(n, 8, 0.0, 1.0));
  const auto& z = path.observations;
  const double mean = mean_of(z, 0, n);
  EXPECT_LT(std::abs(mean), 5.0 * std::sqrt(3.0 / n) * 2.0);
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    c0 += z[k] * z[k];
    if (k + 1 < n) c1 += z[k] * z[k + 1];
    if (k + 2 < n) c2 += z[k] * z[k + 2];
  }
  c0 /= n;
  c1 /= n - 1;
  c2 /= n - 2;
  // sigma^2 (K*K)(h) = e^{-h}(1 + h)
  EXPECT_NEAR(c0, 1.0, 0.05);
  EXPECT_NEAR(c1, 2.0 * std::exp(-1.0), 0.05);
  EXPECT_NEAR(c2, 3.0 * std::exp(-2.0), 0.05);
}

TEST(SimulatePath, DriftShiftsByKernelMass) {
  auto spec = base_spec(50, 6, 0.0, 0.0);
  spec.model.drift = 0.25;
  const auto path = levyma::simulate_path(spec);
  for (double z : path.observations) EXPECT_NEAR(z, 0.5, 1e-15);
}

TEST(SimulatePath, RejectsInvalidInput) {
  auto spec = base_spec(10, 1);
  spec.n = 0;
  EXPECT_THROW(levyma::simulate_path(spec), levyma::InvalidParameter);
  spec = base_spec(10, 1);
  spec.delta = 0.0;
  EXPECT_THROW(levyma::simulate_path(spec), levyma::InvalidParameter);
  spec = base_spec(10, 1);
  spec.trunc_level = 2.0;
  EXPECT_THROW(levyma::simulate_path(spec), levyma::DomainError);
  spec = base_spec(10, 1);
  spec.model.jumps = JumpDensity::tempered_stable(0.5, 1.0);
  EXPECT_THROW(levyma::simulate_path(spec), levyma::InvalidParameter);
}

TEST(SimulateJumps, WindowsAndMarks) {
  auto spec = base_spec(1000, 12);
  const double x_max = spec.resolved_x_max();
  const auto jumps = levyma::simulate_jumps(spec);
  std::size_t positive = 0;
  for (const auto& j : jumps) {
    EXPECT_GT(j.size, 0.0);
    if (j.side == levyma::JumpSide::Positive) {
      ++positive;
      EXPECT_GT(j.time, 0.0);
      EXPECT_LT(j.time, 1000.0 + x_max);
    } else {
      EXPECT_LT(j.time, 0.0);
      EXPECT_GT(j.time, -x_max);
    }
  }
  // Poisson count on a window of length n + x_max.
  const double expected = 1000.0 + x_max;
  EXPECT_NEAR(static_cast<double>(positive), expected, 5.0 * std::sqrt(expected));
}

TEST(BandedCholesky, ReproducesCovariance) {
  const auto k = Kernel::gamma_exponential(1, 0.8);
  std::vector<double> cov;
  for (int j = 0; j < 12; ++j) cov.push_back(k.autoconvolution(j));
  const std::size_t n = 30;
  const std::size_t b = cov.size() - 1;
  const auto band = levyma::banded_cholesky(cov, n);
  ASSERT_EQ(band.size(), n * (b + 1));
  auto l = [&](std::size_t i, std::size_t j) -> double {
    if (j > i || i - j > b) return 0.0;
    return band[i * (b + 1) + (b - (i - j))];
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m <= j; ++m) s += l(i, m) * l(j, m);
      const double expected = (i - j <= b) ? cov[i - j] : 0.0;
      EXPECT_NEAR(s, expected, 1e-12) << i << ',' << j;
    }
  }
}

TEST(BandedCholesky, RejectsIndefinite) {
  EXPECT_THROW(levyma::banded_cholesky({1.0, 1.5}, 5), levyma::NotPositiveDefinite);
}

class PathCsv : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "levyma_simulate_test";
  void SetUp() override { std::filesystem::create_directories(dir_); }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  static std::size_t line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t lines = 0;
    std::string s;
    while (std::getline(in, s)) ++lines;
    return lines;
  }
};

TEST_F(PathCsv, SingleObservation) {
  const auto path = levyma::simulate_path(base_spec(1, 5));
  levyma::export_path(path, dir_ / "one.csv");
  EXPECT_EQ(line_count(dir_ / "one.csv"), 2u);
}

TEST_F(PathCsv, RoundTrip) {
  for (double delta : {1.0, 0.25}) {
    auto spec = base_spec(777, 31, 1.0, 0.3);
    spec.delta = delta;
    const auto path = levyma::simulate_path(spec);
    levyma::export_path(path, dir_ / "p.csv");
    EXPECT_EQ(line_count(dir_ / "p.csv"), 778u);
    const auto back = levyma::import_path(dir_ / "p.csv");
    EXPECT_TRUE(back == path);
  }
}

TEST_F(PathCsv, ImportRejectsMalformedFiles) {
  {
    std::ofstream out(dir_ / "bad_header.csv");
    out << "k,z\n1,2\n";
  }
  EXPECT_THROW(levyma::import_path(dir_ / "bad_header.csv"), levyma::IoError);
  {
    std::ofstream out(dir_ / "gap.csv");
    out << "k,t,z\n1,1,0.5\n3,3,0.1\n";
  }
  EXPECT_THROW(levyma::import_path(dir_ / "gap.csv"), levyma::IoError);
  EXPECT_THROW(levyma::import_path(dir_ / "missing.csv"), levyma::IoError);
}

}  // namespace
