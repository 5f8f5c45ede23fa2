#include "levyma/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "levyma/ecf.hpp"
#include "levyma/errors.hpp"
#include "levyma/simulate.hpp"

namespace levyma {
namespace {

using json = nlohmann::json;

constexpr std::size_t kMinRiskPoints = 64;

double truth_value(const JumpDensity& truth, DensityTarget target, double x) {
  return target == DensityTarget::Nu ? truth.density(x) : truth.weighted(x);
}

TuningGrid parse_grid(const json& j, const TuningGrid& fallback) {
  TuningGrid g = fallback;
  if (j.contains("u")) g.u = j.at("u").get<std::vector<double>>();
  if (j.contains("v")) g.v = j.at("v").get<std::vector<double>>();
  return g;
}

void sort_grid(TuningGrid& g) {
  std::sort(g.u.begin(), g.u.end());
  std::sort(g.v.begin(), g.v.end());
}

std::pair<double, double> mean_and_variance(const std::vector<double>& xs) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double x : xs) {
    if (std::isnan(x)) continue;
    sum += x;
    ++count;
  }
  if (count == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (double x : xs) {
    if (!std::isnan(x)) ss += (x - mean) * (x - mean);
  }
  const double var = count > 1 ? ss / static_cast<double>(count - 1) : 0.0;
  return {mean, var};
}

}  // namespace

Kernel StudyConfig::kernel() const { return Kernel::gamma_exponential(kernel_r, kernel_rho, sidedness); }

LevyTriplet StudyConfig::model() const {
  LevyTriplet m;
  m.sigma2 = sigma2;
  m.jumps = lambda > 0.0 ? JumpDensity::exponential_cpp(lambda) : JumpDensity::none();
  return m;
}

const TuningGrid& StudyConfig::grid_for(std::size_t n) const {
  auto it = per_n.find(n);
  return it != per_n.end() ? it->second : grid;
}

std::vector<std::uint64_t> StudyConfig::reporting_seeds() const {
  std::vector<std::uint64_t> seeds(runs);
  for (std::size_t i = 0; i < runs; ++i) seeds[i] = base_seed + i;
  return seeds;
}

std::vector<std::uint64_t> StudyConfig::tuning_seeds() const {
  if (paper_faithful) return reporting_seeds();
  const std::size_t count = tuning_runs.value_or(runs);
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = base_seed + tuning_seed_offset + i;
  return seeds;
}

std::vector<double> StudyConfig::risk_grid() const {
  return uniform_grid(risk_a, risk_b, risk_points);
}

void StudyConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (n_list.empty()) throw ConfigError("n-list must not be empty");
  for (auto n : n_list) {
    if (n < 1) throw ConfigError("every n must be >= 1");
    const auto& g = grid_for(n);
    if (g.u.empty() || g.v.empty()) throw ConfigError("tuning grids must not be empty");
  }
  if (!(risk_a < risk_b)) throw ConfigError("risk interval needs a < b");
  if (risk_points < kMinRiskPoints) throw ConfigError("risk grid needs at least 64 points");
  if (!(lambda >= 0.0) || !(sigma2 >= 0.0)) throw ConfigError("lambda and sigma2 must be >= 0");
  if (!paper_faithful && tuning_seed_offset < runs) {
    throw ConfigError("tuning seed block overlaps the reporting seeds");
  }
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("c must lie in (0, 1)");
  if (use_true_lambda && !(lambda > 0.0)) throw ConfigError("use_true_lambda needs lambda > 0");
  (void)kernel();
}

StudyConfig parse_study_config(const std::string& json_text) {
  StudyConfig cfg;
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("model")) {
      const auto& m = j.at("model");
      cfg.lambda = m.value("lambda", cfg.lambda);
      cfg.sigma2 = m.value("sigma2", cfg.sigma2);
    }
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      cfg.kernel_r = k.value("r", cfg.kernel_r);
      cfg.kernel_rho = k.value("rho", cfg.kernel_rho);
      const std::string side = k.value("sidedness", std::string("two-sided"));
      if (side == "two-sided") {
        cfg.sidedness = Sidedness::TwoSided;
      } else if (side == "one-sided") {
        cfg.sidedness = Sidedness::OneSided;
      } else {
        throw ConfigError("kernel.sidedness must be two-sided or one-sided");
      }
    }
    cfg.delta = j.value("delta", cfg.delta);
    if (j.contains("n")) cfg.n_list = j.at("n").get<std::vector<std::size_t>>();
    cfg.runs = j.value("runs", cfg.runs);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    if (j.contains("estimator")) {
      const auto& e = j.at("estimator");
      if (e.contains("variant")) cfg.variant = parse_line_variant(e.at("variant").get<std::string>());
      cfg.c = e.value("c", cfg.c);
      if (e.contains("k_points")) cfg.k_points = e.at("k_points").get<std::size_t>();
      cfg.use_true_lambda = e.value("use_true_lambda", cfg.use_true_lambda);
      if (e.contains("quadrature")) {
        const auto& q = e.at("quadrature");
        cfg.quadrature.panels = q.value("panels", cfg.quadrature.panels);
        cfg.quadrature.nodes_per_panel = q.value("nodes_per_panel", cfg.quadrature.nodes_per_panel);
        cfg.quadrature.ratio = q.value("ratio", cfg.quadrature.ratio);
        cfg.quadrature.max_width = q.value("max_width", cfg.quadrature.max_width);
      }
    }
    if (j.contains("tuning")) {
      const auto& t = j.at("tuning");
      cfg.grid = parse_grid(t, cfg.grid);
      if (t.contains("per_n")) {
        for (const auto& [key, value] : t.at("per_n").items()) {
          cfg.per_n[static_cast<std::size_t>(std::stoull(key))] = parse_grid(value, cfg.grid);
        }
      }
      cfg.tuning_seed_offset = t.value("seed_offset", cfg.tuning_seed_offset);
      if (t.contains("runs")) cfg.tuning_runs = t.at("runs").get<std::size_t>();
      cfg.paper_faithful = t.value("paper_faithful", cfg.paper_faithful);
    }
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      cfg.trunc_level = s.value("trunc_level", cfg.trunc_level);
      if (s.contains("x_max") && !s.at("x_max").is_null()) cfg.x_max = s.at("x_max").get<double>();
    }
    if (j.contains("risk")) {
      const auto& r = j.at("risk");
      cfg.risk_a = r.value("a", cfg.risk_a);
      cfg.risk_b = r.value("b", cfg.risk_b);
      cfg.risk_points = r.value("points", cfg.risk_points);
    }
    if (j.contains("mellin_decay_gamma") && !j.at("mellin_decay_gamma").is_null()) {
      cfg.mellin_decay_gamma = j.at("mellin_decay_gamma").get<double>();
    }
    const std::string policy = j.value("failure_policy", std::string("abort"));
    if (policy == "abort") {
      cfg.failure_policy = FailurePolicy::Abort;
    } else if (policy == "skip") {
      cfg.failure_policy = FailurePolicy::SkipAndFlag;
    } else {
      throw ConfigError("failure_policy must be abort or skip");
    }
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  for (auto& [n, g] : cfg.per_n) sort_grid(g);
  sort_grid(cfg.grid);
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_study_config(buffer.str());
}

double risk_l2(const DensityEstimate& estimate, const JumpDensity& truth, double a, double b) {
  const double eps = 1e-12 * std::max(1.0, std::abs(b));
  std::vector<double> xs;
  std::vector<double> err2;
  for (std::size_t i = 0; i < estimate.x.size(); ++i) {
    const double x = estimate.x[i];
    if (x < a - eps || x > b + eps) continue;
    const double d = estimate.values[i] - truth_value(truth, estimate.target, x);
    xs.push_back(x);
    err2.push_back(d * d);
  }
  if (xs.size() < kMinRiskPoints || std::abs(xs.front() - a) > eps || std::abs(xs.back() - b) > eps) {
    throw InvalidParameter("risk grid must cover [a, b] with at least 64 points");
  }
  const std::size_t intervals = xs.size() - 1;
  const double h = (xs.back() - xs.front()) / static_cast<double>(intervals);
  bool uniform = true;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * h) {
      uniform = false;
      break;
    }
  }
  double total = 0.0;
  if (uniform && intervals % 2 == 0) {
    total = err2.front() + err2.back();
    for (std::size_t i = 1; i < intervals; ++i) total += (i % 2 == 1 ? 4.0 : 2.0) * err2[i];
    total *= h / 3.0;
  } else {
    for (std::size_t i = 1; i < xs.size(); ++i) {
      total += 0.5 * (xs[i] - xs[i - 1]) * (err2[i] + err2[i - 1]);
    }
  }
  return total;
}

std::size_t resolve_thread_count(std::size_t configured) {
  if (const char* env = std::getenv("LEVYMA_THREADS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("LEVYMA_THREADS is not a positive integer: ") + env);
    }
  }
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RiskCell> evaluate_cells(const StudyConfig& config, std::size_t n,
                                     const TuningGrid& grid,
                                     const std::vector<std::uint64_t>& seeds) {
  config.validate();
  const Kernel kernel = config.kernel();
  const LevyTriplet model = config.model();
  const JumpDensity truth = JumpDensity::exponential_cpp(config.lambda > 0.0 ? config.lambda : 1.0);
  const auto x_grid = config.risk_grid();
  const double sigma2_l2 = config.sigma2 * kernel.l2_norm_sq();
  const std::optional<double> driver_mean =
      config.use_true_lambda ? std::optional<double>(model.jumps.first_moment()) : std::nullopt;

  const std::size_t nu = grid.u.size();
  const std::size_t nv = grid.v.size();
  const std::size_t runs = seeds.size();
  // risks[(iu * nv + iv) * runs + run]
  std::vector<double> risks(nu * nv * runs, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> seconds(nu * nv * runs, 0.0);
  std::vector<std::exception_ptr> errors(runs);

  auto work = [&](std::size_t run) {
    using clock = std::chrono::steady_clock;
    SimulationSpec spec{model, kernel, config.delta, n, config.trunc_level, config.x_max,
                        seeds[run]};
    const auto t0 = clock::now();
    SamplePath path;
    try {
      path = simulate_path(spec);
    } catch (...) {
      errors[run] = std::current_exception();
      return;
    }
    const double sim_share =
        std::chrono::duration<double>(clock::now() - t0).count() / static_cast<double>(nu * nv);
    const EmpiricalCf ecf(path.observations);
    for (std::size_t iu = 0; iu < nu; ++iu) {
      try {
        const auto t1 = clock::now();
        const ForwardIntegrator integrator(empirical_source(ecf, sigma2_l2), config.c, grid.u[iu],
                                           config.quadrature);
        const double fwd_share =
            std::chrono::duration<double>(clock::now() - t1).count() / static_cast<double>(nv);
        for (std::size_t iv = 0; iv < nv; ++iv) {
          const auto t2 = clock::now();
          const LineGrid lg = config.k_points ? LineGrid{config.c, grid.v[iv], *config.k_points}
                                              : LineGrid::with_default_count(config.c, grid.v[iv]);
          MellinLineEstimate line;
          switch (config.variant) {
            case LineVariant::SecondDerivative:
              line = integrator.second(lg);
              break;
            case LineVariant::FirstDerivative:
              line = integrator.first(lg);
              break;
            case LineVariant::FirstDerivativeStabilized:
              line = integrator.first_stabilized(lg, ecf.mean(), kernel, driver_mean);
              break;
          }
          const auto est = inverse_mellin(line, kernel, x_grid);
          const std::size_t slot = (iu * nv + iv) * runs + run;
          risks[slot] = risk_l2(est, truth, config.risk_a, config.risk_b);
          seconds[slot] = sim_share + fwd_share +
                          std::chrono::duration<double>(clock::now() - t2).count();
        }
      } catch (...) {
        if (!errors[run]) errors[run] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::min(resolve_thread_count(config.threads), runs);
  if (threads <= 1) {
    for (std::size_t run = 0; run < runs; ++run) work(run);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t run = next++; run < runs; run = next++) work(run);
      });
    }
    for (auto& th : pool) th.join();
  }

  if (config.failure_policy == FailurePolicy::Abort) {
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<RiskCell> cells;
  for (std::size_t iu = 0; iu < nu; ++iu) {
    for (std::size_t iv = 0; iv < nv; ++iv) {
      RiskCell cell;
      cell.n = n;
      cell.u = grid.u[iu];
      cell.v = grid.v[iv];
      const std::size_t base = (iu * nv + iv) * runs;
      cell.risks.assign(risks.begin() + base, risks.begin() + base + runs);
      for (std::size_t r = 0; r < runs; ++r) {
        if (std::isnan(cell.risks[r])) ++cell.failures;
        cell.wall_seconds += seconds[base + r];
      }
      std::tie(cell.mean, cell.variance) = mean_and_variance(cell.risks);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

RiskReport run_study(const StudyConfig& config) {
  config.validate();
  RiskReport report;
  std::ostringstream prov;
  prov << "variant=" << to_string(config.variant) << " c=" << config.c
       << " delta=" << config.delta << " runs=" << config.runs << " base_seed=" << config.base_seed
       << " lambda=" << config.lambda << " sigma2=" << config.sigma2
       << " kernel=" << config.kernel().describe() << " trunc_level=" << config.trunc_level
       << " true_lambda=" << (config.use_true_lambda ? "yes" : "no");
  report.provenance = prov.str();
  const auto seeds = config.reporting_seeds();
  for (auto n : config.n_list) {
    auto cells = evaluate_cells(config, n, config.grid_for(n), seeds);
    for (auto& c : cells) report.cells.push_back(std::move(c));
  }
  return report;
}

std::vector<TunedPair> tune_parameters(const StudyConfig& config) {
  config.validate();
  const auto seeds = config.tuning_seeds();
  std::vector<TunedPair> out;
  for (auto n : config.n_list) {
    TuningGrid grid = config.grid_for(n);
    sort_grid(grid);
    if (grid.u.empty() || grid.v.empty()) throw ConfigError("empty tuning grid");
    const auto cells = evaluate_cells(config, n, grid, seeds);
    const RiskCell* best = nullptr;
    // Cells are ordered by U then V, so strict < keeps the smallest tied pair.
    for (const auto& cell : cells) {
      if (std::isnan(cell.mean)) continue;
      if (!best || cell.mean < best->mean) best = &cell;
    }
    if (!best) throw Error("every tuning run failed for n=" + std::to_string(n));
    out.push_back({n, best->u, best->v, best->mean});
  }
  return out;
}

void emit_table(const RiskReport& report, const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw IoError("cannot open " + destination.string() + " for writing");
  out << "n,U,V,mean_risk,var_risk\n" << std::setprecision(17);
  for (const auto& c : report.cells) {
    out << c.n << ',' << c.u << ',' << c.v << ',' << c.mean << ',' << c.variance << '\n';
  }
  if (!out) throw IoError("failed writing " + destination.string());
}

RiskReport read_table(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw IoError("cannot open " + source.string());
  std::string line;
  if (!std::getline(in, line) || line != "n,U,V,mean_risk,var_risk") {
    throw IoError(source.string() + ": unexpected table header");
  }
  RiskReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    RiskCell c;
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw IoError(source.string() + ": malformed row '" + line + "'");
    c.n = std::stoull(fields[0]);
    c.u = std::stod(fields[1]);
    c.v = std::stod(fields[2]);
    c.mean = std::stod(fields[3]);
    c.variance = std::stod(fields[4]);
    report.cells.push_back(c);
  }
  return report;
}

void emit_plotdata(const DensityEstimate& estimate, const JumpDensity& truth,
                   const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw IoError("cannot open " + destination.string() + " for writing");
  out << "x,nu_hat,nu_true\n" << std::setprecision(17);
  for (std::size_t i = 0; i < estimate.x.size(); ++i) {
    out << estimate.x[i] << ',' << estimate.values[i] << ','
        << truth_value(truth, estimate.target, estimate.x[i]) << '\n';
  }
}

}  // namespace levyma
