#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "levyma/errors.hpp"
#include "levyma/experiment.hpp"
#include "levyma/kernels.hpp"
#include "levyma/levy_models.hpp"
#include "levyma/mellin_estimator.hpp"
#include "levyma/simulate.hpp"

namespace {

struct KernelFlags {
  unsigned r = 0;
  double rho = 1.0;
  bool one_sided = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel-r", r, "Kernel power r")->capture_default_str();
    cmd->add_option("--kernel-rho", rho, "Kernel decay rate rho")->capture_default_str();
    cmd->add_flag("--one-sided", one_sided, "Use the one-sided kernel");
  }

  levyma::Kernel build() const {
    return levyma::Kernel::gamma_exponential(
        r, rho, one_sided ? levyma::Sidedness::OneSided : levyma::Sidedness::TwoSided);
  }
};

std::vector<double> parse_x_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw levyma::ConfigError("--x-grid expects start:stop:count");
  try {
    return levyma::uniform_grid(std::stod(parts[0]), std::stod(parts[1]),
                                static_cast<std::size_t>(std::stoul(parts[2])));
  } catch (const std::logic_error&) {
    throw levyma::ConfigError("--x-grid expects start:stop:count, got '" + spec + "'");
  }
}

void write_density(const levyma::DensityEstimate& est, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw levyma::IoError("cannot open " + out_path + " for writing");
  out << '#';
  for (const auto& [key, value] : est.provenance) out << ' ' << key << '=' << value;
  out << " target=" << (est.target == levyma::DensityTarget::Nu ? "nu" : "x2nu") << '\n';
  out << "x,nu_hat\n" << std::setprecision(17);
  for (std::size_t i = 0; i < est.x.size(); ++i) out << est.x[i] << ',' << est.values[i] << '\n';
}

void write_tuned(const std::vector<levyma::TunedPair>& pairs, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw levyma::IoError("cannot open " + out_path + " for writing");
  out << "n,U,V,tuning_mean_risk\n" << std::setprecision(17);
  for (const auto& p : pairs) out << p.n << ',' << p.u << ',' << p.v << ',' << p.tuning_mean_risk << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy density estimation for moving-average processes"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a sample path and write it as CSV");
  double lambda = 1.0;
  double sigma2 = 0.0;
  double delta = 1.0;
  std::size_t n = 1000;
  double alpha = 0.01;
  std::optional<double> x_max;
  std::uint64_t seed = 1;
  std::string sim_out;
  KernelFlags sim_kernel;
  sim->add_option("--lambda", lambda, "Jump intensity")->capture_default_str();
  sim->add_option("--sigma2", sigma2, "Gaussian variance")->capture_default_str();
  sim_kernel.attach(sim);
  sim->add_option("--delta", delta, "Observation step")->capture_default_str();
  sim->add_option("--n", n, "Number of observations")->capture_default_str();
  sim->add_option("--alpha", alpha, "Kernel truncation level")->capture_default_str();
  sim->add_option("--x-max", x_max, "Truncation radius (overrides --alpha)");
  sim->add_option("--seed", seed, "Random seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate the Levy density from a path CSV");
  std::string est_in;
  std::string variant = "first-stab";
  double c = 0.5;
  double u_max = 0.4;
  double v_max = 1.1;
  std::optional<std::size_t> k_points;
  std::string sigma2_mode = "0";
  double sigma_u = 1.0;
  std::string x_grid = "1:3:257";
  std::string est_out;
  std::optional<double> true_lambda;
  KernelFlags est_kernel;
  est->add_option("--in", est_in, "Path CSV")->required();
  est->add_option("--variant", variant, "second | first | first-stab")
      ->check(CLI::IsMember({"second", "first", "first-stab"}))
      ->capture_default_str();
  est->add_option("--c", c, "Real part of the Mellin line")->capture_default_str();
  est->add_option("--u-max", u_max, "Fourier cut-off U")->capture_default_str();
  est->add_option("--v-max", v_max, "Mellin cut-off V")->capture_default_str();
  est->add_option("--k-points", k_points, "Nodes on the Mellin line (default ceil(200 V))");
  est->add_option("--sigma2", sigma2_mode, "Known value or 'estimate'")->capture_default_str();
  est->add_option("--sigma-u", sigma_u, "Cut-off for the sigma^2 estimate")->capture_default_str();
  est->add_option("--x-grid", x_grid, "start:stop:count")->capture_default_str();
  est->add_option("--true-lambda", true_lambda, "Use this intensity in the stabiliser");
  est_kernel.attach(est);
  est->add_option("--out", est_out, "Output CSV")->required();

  // mc-study and tune
  auto* study = app.add_subcommand("mc-study", "Run the Monte Carlo risk study");
  auto* tune = app.add_subcommand("tune", "Grid-search the tuning parameters");
  std::string config_path;
  std::string study_out = "risk_table.csv";
  std::string tune_out = "tuned.csv";
  std::string plot_dir;
  bool all_cells = false;
  bool paper_faithful = false;
  for (auto* cmd : {study, tune}) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_flag("--paper-faithful", paper_faithful, "Tune on the reporting seeds");
  }
  study->add_option("--out", study_out, "Risk table CSV")->capture_default_str();
  study->add_flag("--all-cells", all_cells, "Report every grid cell instead of the tuned pair");
  study->add_option("--plot-dir", plot_dir, "Write x,nu_hat,nu_true for the first run per n");
  tune->add_option("--out", tune_out, "Tuned pairs CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      levyma::SimulationSpec spec{levyma::LevyTriplet{}, sim_kernel.build()};
      spec.model.sigma2 = sigma2;
      spec.model.jumps = lambda > 0.0 ? levyma::JumpDensity::exponential_cpp(lambda)
                                      : levyma::JumpDensity::none();
      spec.delta = delta;
      spec.n = n;
      spec.trunc_level = alpha;
      spec.x_max = x_max;
      spec.seed = seed;
      levyma::export_path(levyma::simulate_path(spec), sim_out);
      return 0;
    }

    if (est->parsed()) {
      const auto path = levyma::import_path(est_in);
      levyma::EstimatorConfig cfg;
      cfg.variant = levyma::parse_line_variant(variant);
      cfg.c = c;
      cfg.u_max = u_max;
      cfg.v_max = v_max;
      cfg.k_points = k_points;
      cfg.sigma_u = sigma_u;
      if (sigma2_mode == "estimate") {
        cfg.estimate_sigma2 = true;
      } else {
        try {
          cfg.sigma2 = std::stod(sigma2_mode);
        } catch (const std::logic_error&) {
          throw levyma::ConfigError("--sigma2 expects a number or 'estimate'");
        }
      }
      cfg.driver_mean = true_lambda;
      const auto xs = parse_x_grid(x_grid);
      write_density(levyma::estimate_levy_density(path, est_kernel.build(), cfg, xs), est_out);
      return 0;
    }

    auto config = levyma::load_study_config(config_path);
    if (paper_faithful) config.paper_faithful = true;
    config.validate();

    if (tune->parsed()) {
      write_tuned(levyma::tune_parameters(config), tune_out);
      return 0;
    }

    levyma::RiskReport report;
    if (all_cells) {
      report = levyma::run_study(config);
    } else {
      const auto tuned = levyma::tune_parameters(config);
      const auto seeds = config.reporting_seeds();
      for (const auto& pair : tuned) {
        auto cells = levyma::evaluate_cells(config, pair.n, {{pair.u}, {pair.v}}, seeds);
        report.cells.push_back(std::move(cells.front()));
      }
    }
    std::size_t failures = 0;
    for (const auto& cell : report.cells) failures += cell.failures;
    levyma::emit_table(report, study_out);

    if (!plot_dir.empty()) {
      std::filesystem::create_directories(plot_dir);
      const auto kernel = config.kernel();
      const auto truth = levyma::JumpDensity::exponential_cpp(config.lambda);
      for (const auto& cell : report.cells) {
        levyma::SimulationSpec spec{config.model(), kernel, config.delta, cell.n,
                                    config.trunc_level, config.x_max, config.base_seed};
        levyma::EstimatorConfig ecfg;
        ecfg.variant = config.variant;
        ecfg.c = config.c;
        ecfg.u_max = cell.u;
        ecfg.v_max = cell.v;
        ecfg.k_points = config.k_points;
        ecfg.sigma2 = config.sigma2;
        ecfg.quadrature = config.quadrature;
        if (config.use_true_lambda) ecfg.driver_mean = truth.first_moment();
        const auto estimate = levyma::estimate_levy_density(levyma::simulate_path(spec), kernel,
                                                            ecfg, config.risk_grid());
        std::ostringstream name;
        name << plot_dir << "/plot_n" << cell.n << "_U" << cell.u << "_V" << cell.v << ".csv";
        levyma::emit_plotdata(estimate, truth, name.str());
      }
    }
    if (failures > 0) {
      std::cerr << "warning: " << failures << " run(s) failed and were skipped\n";
    }
    return 0;
  } catch (const levyma::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
