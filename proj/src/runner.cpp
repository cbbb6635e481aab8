#include "dvspix/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dvspix/io.hpp"
#include "dvspix/render.hpp"
#include "dvspix/version.hpp"

namespace dvspix {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_provenance(const RunConfig& cfg, const fs::path& path) {
  std::ostringstream out;
  out << "version = " << kVersion << "\n";
  out << "config_hash = " << hex64(fnv1a64(cfg.serialize())) << "\n";
  out << "seed = " << cfg.sim.rng_seed << "\n";
  atomic_write(path, out.str());
}

std::string fmt_cell(double mu, double l) {
  return "mu=" + format_double(mu) + " l=" + format_double(l);
}

}  // namespace

LumaTrace cell_ramp_trace(const RunConfig& cfg, double mu, double l) {
  const double l_lo = l * (1.0 - cfg.ramp_span_frac);
  const double l_hi = l * (1.0 + cfg.ramp_span_frac);
  const double duration = (l_hi - l_lo) / mu;
  return LumaTrace({0.0, duration}, {l_lo, l_hi});
}

SimulateOutcome run_simulate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  SimulateOutcome outcome;
  if (cfg.stimulus == StimulusKind::RampGrid) {
    for (double mu : cfg.ramp_mu) {
      for (double l : cfg.ramp_l) {
        const LumaTrace trace = cell_ramp_trace(cfg, mu, l);
        SimStats stats;
        const auto events =
            simulate_sensor(cfg.sensor_width, cfg.sensor_height, trace, cfg.sim, &stats);
        const fs::path path = cfg.out_dir / cell_file_name(mu, l);
        write_events(path, events);
        outcome.event_files.push_back(path);
        outcome.stats.events += stats.events;
        outcome.stats.skipped_dark_segments += stats.skipped_dark_segments;
        outcome.stats.unfinished_at_end += stats.unfinished_at_end;
        log << "simulated " << fmt_cell(mu, l) << ": " << events.size() << " events -> "
            << path.string() << "\n";
      }
    }
  } else {
    FrameSequence seq = load_frame_dir(cfg.frames_dir);
    seq = interpolate_frames(seq, cfg.interp_factor);
    SimStats stats;
    const auto events = simulate_sensor(seq, cfg.sim, &stats);
    const fs::path path = cfg.out_dir / "events.txt";
    write_events(path, events);
    outcome.event_files.push_back(path);
    outcome.stats = stats;
    log << "simulated " << seq.frames.size() << " frames (" << seq.width() << "x"
        << seq.height() << "): " << events.size() << " events -> " << path.string() << "\n";
  }
  outcome.provenance = cfg.out_dir / "provenance.txt";
  write_provenance(cfg, outcome.provenance);
  return outcome;
}

namespace {

std::string report_csv(const DiscontinuityReport& report) {
  std::string csv =
      "mu_bin,l_bin,n_samples,gap_start,gap_length,product,ig_mean,ig_shape,"
      "ig_mean_shifted,ig_shape_shifted\n";
  for (const CellStats& c : report.cells) {
    csv += format_double(c.mu_center) + "," + format_double(c.l_center) + "," +
           std::to_string(c.n_samples) + "," + format_double(c.gap.gap_start) + "," +
           format_double(c.gap.gap_length) + "," + format_double(c.product) + "," +
           format_double(c.fit_raw.mean) + "," + format_double(c.fit_raw.shape) + "," +
           format_double(c.fit_shifted.mean) + "," + format_double(c.fit_shifted.shape) + "\n";
  }
  return csv;
}

}  // namespace

AnalyzeOutcome run_analyze(const RunConfig& cfg, std::ostream& log,
                           const std::optional<std::set<CellKey>>& cells, bool write_outputs) {
  cfg.validate();
  std::vector<IntervalSample> samples;
  std::size_t skipped = 0;
  if (cfg.stimulus == StimulusKind::RampGrid) {
    for (double mu : cfg.ramp_mu) {
      for (double l : cfg.ramp_l) {
        if (cells && !cells->count({mu, l})) continue;
        const fs::path path = cfg.out_dir / cell_file_name(mu, l);
        const auto events = read_events(path);
        if (events.empty()) throw DataError(path.string() + ": no events");
        const LumaTrace trace = cell_ramp_trace(cfg, mu, l);
        const auto cell_samples = intervals_from_events(
            events, [&](int, int) -> const LumaTrace& { return trace; }, &skipped);
        samples.insert(samples.end(), cell_samples.begin(), cell_samples.end());
      }
    }
  } else {
    const fs::path path = cfg.out_dir / "events.txt";
    const auto events = read_events(path);
    if (events.empty()) throw DataError(path.string() + ": no events");
    FrameSequence seq = load_frame_dir(cfg.frames_dir);
    seq = interpolate_frames(seq, cfg.interp_factor);
    std::unordered_map<std::uint64_t, LumaTrace> cache;
    auto trace_for = [&](int x, int y) -> const LumaTrace& {
      const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 32) |
                                static_cast<std::uint32_t>(x);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, trace_from_frames(seq, x, y)).first;
      return it->second;
    };
    samples = intervals_from_events(events, trace_for, &skipped);
  }
  if (samples.empty()) throw DataError("no inter-event intervals to analyze");

  AnalyzeOutcome outcome;
  outcome.report = analyze_cells(samples, cfg.grid, cfg.bin_width, cfg.floor_fraction);
  if (cells) {
    auto& cs = outcome.report.cells;
    cs.erase(std::remove_if(cs.begin(), cs.end(),
                            [&](const CellStats& c) {
                              return !cells->count({c.mu_center, c.l_center});
                            }),
             cs.end());
  }

  log << "intervals: " << samples.size() << " (" << outcome.report.samples_assigned
      << " in cells, " << outcome.report.samples_rejected << " outside grid, " << skipped
      << " events off trace)\n";
  for (const CellStats& c : outcome.report.cells) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "cell mu=%-6g l=%-4g n=%-8zu gap=%.6g s  gap*mu=%.6g", c.mu_center,
                  c.l_center, c.n_samples, c.gap.gap_length, c.product);
    log << line << "\n";
  }
  try {
    outcome.product = product_check(outcome.report);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "mean gap*mu product = %.6g (max rel deviation %.3g%%, %zu cells)",
                  outcome.product.mean_product, outcome.product.max_rel_deviation * 100.0,
                  outcome.product.cells_used);
    log << line << "\n";
  } catch (const std::invalid_argument&) {
    log << "mean gap*mu product: no cell shows a positive gap\n";
  }

  if (write_outputs) {
    fs::create_directories(cfg.out_dir);
    outcome.csv_path = cfg.out_dir / "report.csv";
    atomic_write(outcome.csv_path, report_csv(outcome.report));
    for (const CellStats& c : outcome.report.cells) {
      const fs::path fig = cfg.out_dir / ("cell_mu" + format_double(c.mu_center) + "_l" +
                                          format_double(c.l_center) + ".svg");
      write_cell_svg(fig, c);
      outcome.figure_paths.push_back(fig);
    }
  }
  return outcome;
}

double run_calibrate(const fs::path& csv, std::ostream& log) {
  std::ifstream in(csv);
  if (!in) throw DataError("cannot open calibration CSV: " + csv.string());
  std::vector<std::pair<double, double>> obs;
  std::string line;
  std::size_t line_no = 0;
  int mu_col = 0, gap_col = 1;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (first) {
      first = false;
      // Column headers are optional; the analyze report names its columns.
      const auto mu_it = std::find(fields.begin(), fields.end(), "mu_bin");
      const auto gap_it = std::find(fields.begin(), fields.end(), "gap_length");
      if (mu_it != fields.end() && gap_it != fields.end()) {
        mu_col = static_cast<int>(mu_it - fields.begin());
        gap_col = static_cast<int>(gap_it - fields.begin());
        continue;
      }
      if (!fields.empty() && fields[0].find_first_not_of("0123456789.eE+- \t") != std::string::npos)
        continue;  // plain header such as "mu,gap"
    }
    if (static_cast<int>(fields.size()) <= std::max(mu_col, gap_col))
      throw DataError(csv.string() + ":" + std::to_string(line_no) + ": too few columns");
    try {
      const double mu = std::stod(fields[mu_col]);
      const double gap = std::stod(fields[gap_col]);
      if (gap <= 0.0) continue;  // cells without a measured gap carry no signal
      obs.emplace_back(mu, gap);
    } catch (const std::exception&) {
      throw DataError(csv.string() + ":" + std::to_string(line_no) + ": bad number");
    }
  }
  if (obs.empty()) throw DataError(csv.string() + ": no usable (mu, gap) rows");
  const double k = calibrate_k_delay(obs);
  log << "k_delay = " << format_double(k) << " (" << obs.size() << " rows)\n";
  for (const auto& [mu, gap] : obs) {
    char row[120];
    std::snprintf(row, sizeof(row), "  mu=%-6g gap=%.6g s  fit=%.6g s  residual=%+.3g s", mu,
                  gap, k / mu, gap - k / mu);
    log << row << "\n";
  }
  return k;
}

OracleOutcome run_oracle(const RunConfig& cfg, std::ostream& log, double di_lo, double di_hi,
                         int points, double rel_tol, double fixed_dt) {
  cfg.validate();
  const PixelParams& p = cfg.sim.params;
  if (p.delta_q_e <= 0.0)
    throw ConfigError("oracle sweep needs delta_q_e > 0");
  if (di_lo <= 0.0 || di_hi <= di_lo || points < 2)
    throw ConfigError("oracle sweep needs 0 < di_lo < di_hi and >= 2 points");
  if (fixed_dt < 0.0) throw ConfigError("oracle sweep: dt must be >= 0");
  OracleOutcome outcome;
  log << "delta_i [A]      predicted [s]    integrated [s]   rel err     dt [s]\n";
  for (int i = 0; i < points; ++i) {
    const double di =
        di_lo * std::pow(di_hi / di_lo, static_cast<double>(i) / (points - 1));
    const double predicted = event_delay(di, p);
    // Step chosen per row: fine enough for the tolerance, bounded in steps.
    const double dt =
        fixed_dt > 0.0
            ? fixed_dt
            : std::max(std::min(cfg.sim.time_step_oracle, predicted / 2000.0), predicted / 2e6);
    const double integrated = oracle_capacitor_integrator(0.0, di, p, dt);
    const double integrated_half = oracle_capacitor_integrator(0.0, di, p, dt / 2.0);
    const double rel_err = std::abs(integrated - predicted) / predicted;
    const double halving = std::abs(integrated - integrated_half) / integrated_half;
    outcome.rows.push_back(OracleRow{di, predicted, integrated, rel_err, dt});
    outcome.max_rel_err = std::max(outcome.max_rel_err, rel_err);
    outcome.max_halving_change = std::max(outcome.max_halving_change, halving);
    char row[140];
    std::snprintf(row, sizeof(row), "%-16.6g %-16.9g %-16.9g %-11.3g %-10.3g", di, predicted,
                  integrated, rel_err, dt);
    log << row << "\n";
  }
  char tail[160];
  std::snprintf(tail, sizeof(tail), "max rel err %.3g, max step-halving change %.3g",
                outcome.max_rel_err, outcome.max_halving_change);
  log << tail << "\n";
  if (outcome.max_rel_err > rel_tol)
    throw VerificationError("oracle sweep: closed-form delay deviates from the integrator by " +
                            format_double(outcome.max_rel_err));
  if (outcome.max_halving_change > 1e-3)
    throw VerificationError("oracle sweep: integrator is not step-converged");
  return outcome;
}

}  // namespace dvspix
