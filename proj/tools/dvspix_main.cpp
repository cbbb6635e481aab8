#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "dvspix/config.hpp"
#include "dvspix/errors.hpp"
#include "dvspix/runner.hpp"
#include "dvspix/version.hpp"

namespace {

std::set<dvspix::CellKey> parse_cells(const std::string& spec) {
  std::set<dvspix::CellKey> cells;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw dvspix::ConfigError("--cells expects mu:l pairs, got '" + item + "'");
    try {
      cells.emplace(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw dvspix::ConfigError("--cells expects numeric mu:l pairs, got '" + item + "'");
    }
  }
  if (cells.empty()) throw dvspix::ConfigError("--cells given but empty");
  return cells;
}

dvspix::RunConfig load_with_overrides(const std::string& config_path,
                                      const std::string& out_override,
                                      const std::optional<std::uint64_t>& seed_override) {
  dvspix::RunConfig cfg = dvspix::load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (seed_override) cfg.sim.rng_seed = *seed_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DVS pixel simulator with parasitic event-delay analysis"};
  app.set_version_flag("--version", dvspix::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  std::string cells_spec;
  std::string calib_csv;
  double oracle_dt = 0.0;

  CLI::App* simulate = app.add_subcommand("simulate", "Generate event files for the configured stimulus");
  simulate->add_option("--config", config_path, "run configuration file")->required();
  simulate->add_option("--out", out_override, "override the configured output directory");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_value, "override the configured RNG seed");

  CLI::App* analyze = app.add_subcommand("analyze", "Measure gaps and fit interval distributions");
  analyze->add_option("--config", config_path, "run configuration file")->required();
  analyze->add_option("--out", out_override, "override the configured output directory");
  analyze->add_option("--cells", cells_spec, "restrict to mu:l cells, e.g. 60:10,60:20");

  CLI::App* calibrate = app.add_subcommand("calibrate", "Least-squares k_delay from measured gaps");
  calibrate->add_option("csv", calib_csv, "CSV of measured gaps (mu,gap or an analyze report)")
      ->required();

  CLI::App* oracle = app.add_subcommand("oracle", "Check the closed-form delay against the reference integrator");
  oracle->add_option("--config", config_path, "run configuration file")->required();
  oracle->add_option("--dt", oracle_dt, "force one integrator step size (0 = per-row choice)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  seed_given = seed_opt->count() > 0;

  try {
    const std::optional<std::uint64_t> seed_override =
        seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt;
    if (simulate->parsed()) {
      const auto cfg = load_with_overrides(config_path, out_override, seed_override);
      dvspix::run_simulate(cfg, std::cout);
    } else if (analyze->parsed()) {
      const auto cfg = load_with_overrides(config_path, out_override, seed_override);
      std::optional<std::set<dvspix::CellKey>> cells;
      if (!cells_spec.empty()) cells = parse_cells(cells_spec);
      dvspix::run_analyze(cfg, std::cout, cells);
    } else if (calibrate->parsed()) {
      dvspix::run_calibrate(calib_csv, std::cout);
    } else if (oracle->parsed()) {
      const auto cfg = load_with_overrides(config_path, out_override, seed_override);
      dvspix::run_oracle(cfg, std::cout, 1e-12, 1e-8, 20, 0.01, oracle_dt);
    }
  } catch (const dvspix::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const dvspix::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const dvspix::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
