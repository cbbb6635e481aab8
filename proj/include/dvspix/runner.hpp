#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dvspix/analysis.hpp"
#include "dvspix/config.hpp"

// End-to-end pipelines shared by the command line tool and the test suites.

namespace dvspix {

struct SimulateOutcome {
  std::vector<std::filesystem::path> event_files;
  std::filesystem::path provenance;
  SimStats stats;
};

/// Simulate per the config and write event files plus a provenance sidecar
/// into cfg.out_dir.
SimulateOutcome run_simulate(const RunConfig& cfg, std::ostream& log);

using CellKey = std::pair<double, double>;  // (mu_center, l_center)

struct AnalyzeOutcome {
  DiscontinuityReport report;
  ProductSummary product;
  std::filesystem::path csv_path;
  std::vector<std::filesystem::path> figure_paths;
};

/// Read the event files produced by run_simulate, extract intervals, bin
/// them on the configured grid and write report.csv plus per-cell figures.
/// cells, when given, restricts the grid to those (mu, l) centers.
AnalyzeOutcome run_analyze(const RunConfig& cfg, std::ostream& log,
                           const std::optional<std::set<CellKey>>& cells = std::nullopt,
                           bool write_outputs = true);

/// Least-squares delay constant from a CSV of measured gaps. Accepts plain
/// "mu,gap" rows or the analyze report (mu_bin/gap_length columns).
double run_calibrate(const std::filesystem::path& csv, std::ostream& log);

struct OracleRow {
  double delta_i = 0.0;
  double predicted = 0.0;   // closed-form delay
  double integrated = 0.0;  // fixed-step reference
  double rel_err = 0.0;
  double dt = 0.0;
};

struct OracleOutcome {
  std::vector<OracleRow> rows;
  double max_rel_err = 0.0;
  double max_halving_change = 0.0;  // step-halving sensitivity
};

/// Sweep photocurrent steps across [di_lo, di_hi] (log spaced) and compare
/// the closed-form delay with the reference integrator. Throws
/// VerificationError when a row exceeds rel_tol. fixed_dt forces one step
/// size for every row; 0 picks a per-row step from the config.
OracleOutcome run_oracle(const RunConfig& cfg, std::ostream& log,
                         double di_lo = 1e-12, double di_hi = 1e-8, int points = 20,
                         double rel_tol = 0.01, double fixed_dt = 0.0);

/// Per-cell ramp trace used by both simulate and analyze.
[[nodiscard]] LumaTrace cell_ramp_trace(const RunConfig& cfg, double mu, double l);

}  // namespace dvspix
