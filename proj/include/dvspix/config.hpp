#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dvspix/analysis.hpp"
#include "dvspix/simulator.hpp"

// Run configuration: a plain-text "key = value" file with '#' comments.
// Lists are comma separated. Unknown keys and bad values are reported with
// their line number.

namespace dvspix {

enum class StimulusKind : std::uint8_t { RampGrid, Frames };

struct RunConfig {
  SimConfig sim;

  StimulusKind stimulus = StimulusKind::RampGrid;
  // ramp-grid: one ramp per (mu, l) pair, spanning l*(1 -/+ ramp_span_frac)
  std::vector<double> ramp_mu{50, 100, 200, 300, 400, 500};
  std::vector<double> ramp_l{10, 20, 30, 40, 50};
  double ramp_span_frac = 0.2;
  int sensor_width = 64;
  int sensor_height = 64;
  // frames: directory with *.pgm + timestamps.txt
  std::filesystem::path frames_dir;
  int interp_factor = 1;

  CellGrid grid{{50, 100, 200, 300, 400, 500}, {10, 20, 30, 40, 50}, 0.10};
  double bin_width = 0.5e-3;
  double floor_fraction = 0.02;

  std::filesystem::path out_dir = "out";

  void validate() const;

  /// Canonical text form; hashing it gives the provenance config hash.
  [[nodiscard]] std::string serialize() const;
};

/// Parse and validate a config file. Errors carry the offending line number.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Parse config text (path only used in messages).
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& origin);

/// Event file name for one ramp-grid cell.
[[nodiscard]] std::string cell_file_name(double mu, double l);

[[nodiscard]] std::string format_double(double v);

}  // namespace dvspix
