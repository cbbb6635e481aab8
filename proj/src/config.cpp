#include "dvspix/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dvspix/errors.hpp"
#include "dvspix/io.hpp"

namespace dvspix {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using KeyMap = std::map<std::string, Entry>;

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& origin, const std::string& key, const Entry& e) {
  if (e.value == "inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    fail(origin, e.line, "bad number for " + key + ": '" + e.value + "'");
  }
  if (pos != e.value.size()) fail(origin, e.line, "trailing junk in " + key + ": '" + e.value + "'");
  return v;
}

std::uint64_t to_u64(const std::string& origin, const std::string& key, const Entry& e) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(e.value, &pos);
  } catch (const std::exception&) {
    fail(origin, e.line, "bad integer for " + key + ": '" + e.value + "'");
  }
  if (pos != e.value.size()) fail(origin, e.line, "trailing junk in " + key + ": '" + e.value + "'");
  return v;
}

int to_int(const std::string& origin, const std::string& key, const Entry& e) {
  const std::uint64_t v = to_u64(origin, key, e);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
    fail(origin, e.line, key + " out of range");
  return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& origin, const std::string& key, const Entry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(origin, e.line, "empty element in " + key);
    out.push_back(to_double(origin, key, Entry{item, e.line}));
  }
  if (out.empty()) fail(origin, e.line, "empty list for " + key);
  return out;
}

const char* mode_name(SimMode m) {
  switch (m) {
    case SimMode::Ideal: return "ideal";
    case SimMode::DelayedMechanistic: return "delayed-mechanistic";
    case SimMode::DelayedEmpirical: return "delayed-empirical";
    case SimMode::Stochastic: return "stochastic";
  }
  return "ideal";
}

std::string join(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += format_double(vs[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double roundtrip = 0.0;
  std::sscanf(buf, "%lf", &roundtrip);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    std::sscanf(shorter, "%lf", &roundtrip);
    if (roundtrip == v) return shorter;
  }
  return buf;
}

void RunConfig::validate() const {
  sim.validate();
  grid.validate();
  if (bin_width <= 0.0) throw ConfigError("bin_width must be > 0");
  if (floor_fraction < 0.0 || floor_fraction >= 1.0)
    throw ConfigError("floor_fraction must be in [0, 1)");
  if (out_dir.empty()) throw ConfigError("out_dir must be set");
  if (stimulus == StimulusKind::RampGrid) {
    if (ramp_mu.empty() || ramp_l.empty()) throw ConfigError("ramp grid must be non-empty");
    for (double mu : ramp_mu)
      if (mu <= 0.0) throw ConfigError("ramp_mu entries must be > 0");
    for (double l : ramp_l)
      if (l <= 0.0) throw ConfigError("ramp_l entries must be > 0");
    if (ramp_span_frac <= 0.0 || ramp_span_frac >= 1.0)
      throw ConfigError("ramp_span_frac must be in (0, 1)");
    if (sensor_width <= 0 || sensor_height <= 0)
      throw ConfigError("sensor dimensions must be positive");
  } else {
    if (frames_dir.empty()) throw ConfigError("frames stimulus needs frames_dir");
    if (interp_factor < 1) throw ConfigError("interp_factor must be >= 1");
  }
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  out << "mode = " << mode_name(sim.mode) << "\n";
  out << "seed = " << sim.rng_seed << "\n";
  out << "k_delay = " << format_double(sim.k_delay) << "\n";
  out << "noise_sigma = " << format_double(sim.noise_sigma) << "\n";
  out << "time_step_oracle = " << format_double(sim.time_step_oracle) << "\n";
  const PixelParams& p = sim.params;
  out << "theta_on = " << format_double(p.theta_on) << "\n";
  out << "theta_off = " << format_double(p.theta_off) << "\n";
  out << "gain_diff = " << format_double(p.gain_diff) << "\n";
  out << "kappa_sf = " << format_double(p.kappa_sf) << "\n";
  out << "kappa_fb = " << format_double(p.kappa_fb) << "\n";
  out << "v_thermal = " << format_double(p.v_thermal) << "\n";
  out << "gain_cascode = " << format_double(p.gain_cascode) << "\n";
  out << "c_junction = " << format_double(p.c_junction) << "\n";
  out << "k_photo = " << format_double(p.k_photo) << "\n";
  out << "delta_q_e = " << format_double(p.delta_q_e) << "\n";
  out << "r_shunt = " << format_double(p.r_shunt) << "\n";
  out << "r_series = " << format_double(p.r_series) << "\n";
  out << "stimulus = " << (stimulus == StimulusKind::RampGrid ? "ramp-grid" : "frames") << "\n";
  if (stimulus == StimulusKind::RampGrid) {
    out << "ramp_mu = " << join(ramp_mu) << "\n";
    out << "ramp_l = " << join(ramp_l) << "\n";
    out << "ramp_span_frac = " << format_double(ramp_span_frac) << "\n";
    out << "sensor_width = " << sensor_width << "\n";
    out << "sensor_height = " << sensor_height << "\n";
  } else {
    out << "frames_dir = " << frames_dir.string() << "\n";
    out << "interp_factor = " << interp_factor << "\n";
  }
  out << "mu_centers = " << join(grid.mu_centers) << "\n";
  out << "l_centers = " << join(grid.l_centers) << "\n";
  out << "cell_half_width_frac = " << format_double(grid.half_width_frac) << "\n";
  out << "bin_width = " << format_double(bin_width) << "\n";
  out << "floor_fraction = " << format_double(floor_fraction) << "\n";
  out << "out_dir = " << out_dir.string() << "\n";
  return out.str();
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  KeyMap keys;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "empty key");
    if (value.empty()) fail(origin, line_no, "empty value for " + key);
    if (keys.count(key)) fail(origin, line_no, "duplicate key " + key);
    keys[key] = Entry{value, line_no};
  }

  RunConfig cfg;
  auto take = [&](const char* key) -> const Entry* {
    auto it = keys.find(key);
    if (it == keys.end()) return nullptr;
    return &it->second;
  };
  std::vector<std::string> seen;
  auto mark = [&](const char* key) { seen.emplace_back(key); };

  if (const Entry* e = take("mode")) {
    mark("mode");
    if (e->value == "ideal") cfg.sim.mode = SimMode::Ideal;
    else if (e->value == "delayed-mechanistic") cfg.sim.mode = SimMode::DelayedMechanistic;
    else if (e->value == "delayed-empirical") cfg.sim.mode = SimMode::DelayedEmpirical;
    else if (e->value == "stochastic") cfg.sim.mode = SimMode::Stochastic;
    else fail(origin, e->line, "unknown mode '" + e->value + "'");
  }
  if (const Entry* e = take("seed")) { mark("seed"); cfg.sim.rng_seed = to_u64(origin, "seed", *e); }
  if (const Entry* e = take("k_delay")) { mark("k_delay"); cfg.sim.k_delay = to_double(origin, "k_delay", *e); }
  if (const Entry* e = take("noise_sigma")) { mark("noise_sigma"); cfg.sim.noise_sigma = to_double(origin, "noise_sigma", *e); }
  if (const Entry* e = take("time_step_oracle")) { mark("time_step_oracle"); cfg.sim.time_step_oracle = to_double(origin, "time_step_oracle", *e); }

  PixelParams& p = cfg.sim.params;
  if (const Entry* e = take("theta_on")) { mark("theta_on"); p.theta_on = to_double(origin, "theta_on", *e); }
  if (const Entry* e = take("theta_off")) { mark("theta_off"); p.theta_off = to_double(origin, "theta_off", *e); }
  if (const Entry* e = take("gain_diff")) { mark("gain_diff"); p.gain_diff = to_double(origin, "gain_diff", *e); }
  if (const Entry* e = take("kappa_sf")) { mark("kappa_sf"); p.kappa_sf = to_double(origin, "kappa_sf", *e); }
  if (const Entry* e = take("kappa_fb")) { mark("kappa_fb"); p.kappa_fb = to_double(origin, "kappa_fb", *e); }
  if (const Entry* e = take("v_thermal")) { mark("v_thermal"); p.v_thermal = to_double(origin, "v_thermal", *e); }
  if (const Entry* e = take("gain_cascode")) { mark("gain_cascode"); p.gain_cascode = to_double(origin, "gain_cascode", *e); }
  if (const Entry* e = take("c_junction")) { mark("c_junction"); p.c_junction = to_double(origin, "c_junction", *e); }
  if (const Entry* e = take("k_photo")) { mark("k_photo"); p.k_photo = to_double(origin, "k_photo", *e); }
  if (const Entry* e = take("delta_q_e")) { mark("delta_q_e"); p.delta_q_e = to_double(origin, "delta_q_e", *e); }
  if (const Entry* e = take("r_shunt")) { mark("r_shunt"); p.r_shunt = to_double(origin, "r_shunt", *e); }
  if (const Entry* e = take("r_series")) { mark("r_series"); p.r_series = to_double(origin, "r_series", *e); }

  if (const Entry* e = take("stimulus")) {
    mark("stimulus");
    if (e->value == "ramp-grid") cfg.stimulus = StimulusKind::RampGrid;
    else if (e->value == "frames") cfg.stimulus = StimulusKind::Frames;
    else fail(origin, e->line, "unknown stimulus '" + e->value + "'");
  }
  if (const Entry* e = take("ramp_mu")) { mark("ramp_mu"); cfg.ramp_mu = to_list(origin, "ramp_mu", *e); }
  if (const Entry* e = take("ramp_l")) { mark("ramp_l"); cfg.ramp_l = to_list(origin, "ramp_l", *e); }
  if (const Entry* e = take("ramp_span_frac")) { mark("ramp_span_frac"); cfg.ramp_span_frac = to_double(origin, "ramp_span_frac", *e); }
  if (const Entry* e = take("sensor_width")) { mark("sensor_width"); cfg.sensor_width = to_int(origin, "sensor_width", *e); }
  if (const Entry* e = take("sensor_height")) { mark("sensor_height"); cfg.sensor_height = to_int(origin, "sensor_height", *e); }
  if (const Entry* e = take("frames_dir")) { mark("frames_dir"); cfg.frames_dir = e->value; }
  if (const Entry* e = take("interp_factor")) { mark("interp_factor"); cfg.interp_factor = to_int(origin, "interp_factor", *e); }

  if (const Entry* e = take("mu_centers")) { mark("mu_centers"); cfg.grid.mu_centers = to_list(origin, "mu_centers", *e); }
  if (const Entry* e = take("l_centers")) { mark("l_centers"); cfg.grid.l_centers = to_list(origin, "l_centers", *e); }
  if (const Entry* e = take("cell_half_width_frac")) { mark("cell_half_width_frac"); cfg.grid.half_width_frac = to_double(origin, "cell_half_width_frac", *e); }
  if (const Entry* e = take("bin_width")) { mark("bin_width"); cfg.bin_width = to_double(origin, "bin_width", *e); }
  if (const Entry* e = take("floor_fraction")) { mark("floor_fraction"); cfg.floor_fraction = to_double(origin, "floor_fraction", *e); }
  if (const Entry* e = take("out_dir")) { mark("out_dir"); cfg.out_dir = e->value; }

  for (const auto& [key, entry] : keys)
    if (std::find(seen.begin(), seen.end(), key) == seen.end())
      fail(origin, entry.line, "unknown key '" + key + "'");

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (cfg.stimulus == StimulusKind::Frames && !std::filesystem::exists(cfg.frames_dir))
    throw ConfigError(origin + ": frames_dir does not exist: " + cfg.frames_dir.string());
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string cell_file_name(double mu, double l) {
  return "events_mu" + format_double(mu) + "_l" + format_double(l) + ".txt";
}

}  // namespace dvspix
