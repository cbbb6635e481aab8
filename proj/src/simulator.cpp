#include "dvspix/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "dvspix/errors.hpp"
#include "dvspix/rng.hpp"

namespace dvspix {

namespace {

constexpr double kTimeGrid = 1e9;  // event times live on a 1 ns lattice

struct Crossing {
  double t = 0.0;
  Polarity polarity = Polarity::None;
  std::size_t segment = 0;
};

// First time after t_from at which log-luma departs from log(l_ref) by the
// contrast threshold. Closed form on each linear segment: the comparator
// band around l_ref maps to the luma levels l_ref * exp(+/- theta_c).
std::optional<Crossing> next_crossing(const LumaTrace& trace, double t_from, double l_ref,
                                      double theta_c_on, double theta_c_off) {
  const double up = l_ref * std::exp(theta_c_on);
  const double dn = l_ref * std::exp(-theta_c_off);
  const auto& ts = trace.times();
  const auto& vs = trace.values();
  for (std::size_t s = trace.segment_at(t_from); s + 1 < ts.size(); ++s) {
    const double ta = std::max(ts[s], t_from);
    const double la = trace.value_at(ta);
    const double lb = vs[s + 1];
    if (lb >= up && lb > la) {
      const double slope = (vs[s + 1] - vs[s]) / (ts[s + 1] - ts[s]);
      return Crossing{ta + (up - la) / slope, Polarity::On, s};
    }
    if (lb <= dn && lb < la) {
      const double slope = (vs[s + 1] - vs[s]) / (ts[s + 1] - ts[s]);
      return Crossing{ta + (dn - la) / slope, Polarity::Off, s};
    }
  }
  return std::nullopt;
}

// Arming at zero luma leaves the log reference undefined; move to the next
// breakpoint with light. Returns false when the trace stays dark.
bool skip_dark(const LumaTrace& trace, double& t, double& l, SimStats* stats) {
  while (l <= 0.0) {
    if (t >= trace.t_end()) return false;
    const std::size_t s = trace.segment_at(t);
    if (stats) ++stats->skipped_dark_segments;
    t = trace.times()[s + 1];
    l = trace.value_at(t);
  }
  return true;
}

double mode_delay(SimMode mode, const LumaTrace& trace, const SimConfig& cfg,
                  const Crossing& c, double l_ref) {
  switch (mode) {
    case SimMode::Ideal:
      return 0.0;
    case SimMode::DelayedMechanistic: {
      const double di = cfg.params.k_photo * std::abs(trace.value_at(c.t) - l_ref);
      return event_delay(di, cfg.params);
    }
    case SimMode::DelayedEmpirical:
    case SimMode::Stochastic: {
      const auto& ts = trace.times();
      const auto& vs = trace.values();
      const double slope = (vs[c.segment + 1] - vs[c.segment]) / (ts[c.segment + 1] - ts[c.segment]);
      return delay_from_speed(std::abs(slope), cfg.k_delay);
    }
  }
  return 0.0;
}

std::vector<EventRecord> run_deterministic(const LumaTrace& trace, const SimConfig& cfg,
                                           SimMode mode, int x, int y, SimStats* stats,
                                           std::vector<EventTiming>* timings) {
  const double th_on = cfg.params.contrast_threshold_on();
  const double th_off = cfg.params.contrast_threshold_off();
  std::vector<EventRecord> events;
  double t_ref = trace.t_begin();
  double l_ref = trace.value_at(t_ref);
  while (true) {
    if (!skip_dark(trace, t_ref, l_ref, stats)) break;
    const auto cross = next_crossing(trace, t_ref, l_ref, th_on, th_off);
    if (!cross) break;
    const double delay = mode_delay(mode, trace, cfg, *cross, l_ref);
    const double t_emit = cross->t + delay;
    if (t_emit > trace.t_end()) {
      if (stats) ++stats->unfinished_at_end;
      break;
    }
    events.push_back(EventRecord{quantize_time(t_emit), x, y, cross->polarity});
    if (timings) timings->push_back(EventTiming{cross->t, t_emit});
    if (stats) ++stats->events;
    t_ref = t_emit;
    l_ref = trace.value_at(t_ref);
  }
  return events;
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (mode == SimMode::DelayedEmpirical || mode == SimMode::Stochastic)
    if (k_delay <= 0.0) throw std::invalid_argument("SimConfig: k_delay must be > 0");
  if (mode == SimMode::Stochastic && noise_sigma <= 0.0)
    throw std::invalid_argument("SimConfig: stochastic mode needs noise_sigma > 0");
  if (noise_sigma < 0.0) throw std::invalid_argument("SimConfig: noise_sigma must be >= 0");
  if (time_step_oracle <= 0.0)
    throw std::invalid_argument("SimConfig: time_step_oracle must be > 0");
}

double quantize_time(double t) {
  return std::round(t * kTimeGrid) / kTimeGrid;
}

bool event_before(const EventRecord& a, const EventRecord& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return static_cast<int>(a.polarity) < static_cast<int>(b.polarity);
}

std::vector<EventRecord> simulate_pixel_ideal(const LumaTrace& trace, const SimConfig& cfg,
                                              int x, int y, SimStats* stats) {
  cfg.validate();
  return run_deterministic(trace, cfg, SimMode::Ideal, x, y, stats, nullptr);
}

std::vector<EventRecord> simulate_pixel_delayed(const LumaTrace& trace, const SimConfig& cfg,
                                                int x, int y, SimStats* stats,
                                                std::vector<EventTiming>* timings) {
  cfg.validate();
  if (cfg.mode != SimMode::DelayedMechanistic && cfg.mode != SimMode::DelayedEmpirical)
    throw std::invalid_argument("simulate_pixel_delayed: cfg.mode must be a delayed mode");
  return run_deterministic(trace, cfg, cfg.mode, x, y, stats, timings);
}

std::vector<EventRecord> simulate_pixel_stochastic(const LumaTrace& trace, const SimConfig& cfg,
                                                   int x, int y, SimStats* stats) {
  cfg.validate();
  if (cfg.mode != SimMode::Stochastic)
    throw std::invalid_argument("simulate_pixel_stochastic: cfg.mode must be Stochastic");
  const double th_on = cfg.params.contrast_threshold_on();
  const double th_off = cfg.params.contrast_threshold_off();
  RandomStream rng = RandomStream::for_pixel(cfg.rng_seed, x, y);
  std::vector<EventRecord> events;
  double t_ref = trace.t_begin();
  double l_ref = trace.value_at(t_ref);
  while (true) {
    if (!skip_dark(trace, t_ref, l_ref, stats)) break;
    double slope = trace.slope_at(t_ref);
    if (slope == 0.0) {
      // Static light: no drift, no crossing. Re-arm at the next breakpoint.
      const std::size_t s = trace.segment_at(t_ref);
      if (trace.times()[s + 1] >= trace.t_end()) break;
      t_ref = trace.times()[s + 1];
      l_ref = trace.value_at(t_ref);
      continue;
    }
    const double theta_c = slope > 0.0 ? th_on : th_off;
    const double drift = std::abs(slope) / l_ref;
    const double mean = theta_c / drift;
    const double shape = (theta_c / cfg.noise_sigma) * (theta_c / cfg.noise_sigma);
    const double wait = rng.inverse_gaussian(mean, shape);
    const double t_cross = t_ref + wait;
    if (t_cross > trace.t_end()) break;
    const double slope_cross = trace.slope_at(t_cross);
    if (slope_cross == 0.0) {
      // Crossing sampled into a flat stretch: the charging current vanishes
      // there, so no event completes; re-arm past the flat segment.
      const std::size_t s = trace.segment_at(t_cross);
      if (trace.times()[s + 1] >= trace.t_end()) break;
      t_ref = trace.times()[s + 1];
      l_ref = trace.value_at(t_ref);
      continue;
    }
    const double t_emit = t_cross + delay_from_speed(std::abs(slope_cross), cfg.k_delay);
    if (t_emit > trace.t_end()) {
      if (stats) ++stats->unfinished_at_end;
      break;
    }
    events.push_back(EventRecord{quantize_time(t_emit), x, y,
                                 slope > 0.0 ? Polarity::On : Polarity::Off});
    if (stats) ++stats->events;
    t_ref = t_emit;
    l_ref = trace.value_at(t_ref);
  }
  return events;
}

std::vector<EventRecord> simulate_sensor(
    int width, int height, const std::function<const LumaTrace&(int, int)>& trace_for,
    const SimConfig& cfg, SimStats* stats, int threads) {
  cfg.validate();
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("simulate_sensor: sensor dimensions must be positive");
  const std::size_t n_pixels = static_cast<std::size_t>(width) * height;
  std::vector<std::vector<EventRecord>> per_pixel(n_pixels);
  std::vector<SimStats> per_thread_stats;

  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min<int>(n_threads, static_cast<int>(n_pixels));
  per_thread_stats.resize(n_threads);

  auto worker = [&](int tid) {
    SimStats* st = stats ? &per_thread_stats[tid] : nullptr;
    for (std::size_t i = tid; i < n_pixels; i += n_threads) {
      const int x = static_cast<int>(i % width);
      const int y = static_cast<int>(i / width);
      const LumaTrace& trace = trace_for(x, y);
      switch (cfg.mode) {
        case SimMode::Ideal:
          per_pixel[i] = run_deterministic(trace, cfg, SimMode::Ideal, x, y, st, nullptr);
          break;
        case SimMode::DelayedMechanistic:
        case SimMode::DelayedEmpirical:
          per_pixel[i] = run_deterministic(trace, cfg, cfg.mode, x, y, st, nullptr);
          break;
        case SimMode::Stochastic:
          per_pixel[i] = simulate_pixel_stochastic(trace, cfg, x, y, st);
          break;
      }
    }
  };

  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (stats)
    for (const SimStats& st : per_thread_stats) {
      stats->events += st.events;
      stats->skipped_dark_segments += st.skipped_dark_segments;
      stats->unfinished_at_end += st.unfinished_at_end;
    }

  std::size_t total = 0;
  for (const auto& v : per_pixel) total += v.size();
  std::vector<EventRecord> merged;
  merged.reserve(total);
  for (auto& v : per_pixel) merged.insert(merged.end(), v.begin(), v.end());
  std::sort(merged.begin(), merged.end(), event_before);
  return merged;
}

std::vector<EventRecord> simulate_sensor(int width, int height, const LumaTrace& shared_trace,
                                         const SimConfig& cfg, SimStats* stats, int threads) {
  return simulate_sensor(
      width, height, [&](int, int) -> const LumaTrace& { return shared_trace; }, cfg, stats,
      threads);
}

std::vector<EventRecord> simulate_sensor(const FrameSequence& seq, const SimConfig& cfg,
                                         SimStats* stats, int threads) {
  seq.validate();
  const int w = seq.width();
  const int h = seq.height();
  std::vector<LumaTrace> traces;
  traces.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) traces.push_back(trace_from_frames(seq, x, y));
  return simulate_sensor(
      w, h,
      [&](int x, int y) -> const LumaTrace& {
        return traces[static_cast<std::size_t>(y) * w + x];
      },
      cfg, stats, threads);
}

double oracle_capacitor_integrator(const std::function<double(double)>& delta_i_of_t,
                                   const PixelParams& p, double dt, std::uint64_t max_steps) {
  if (dt <= 0.0) throw std::invalid_argument("oracle_capacitor_integrator: dt must be > 0");
  if (p.delta_q_e == 0.0) return 0.0;
  double q = 0.0;
  for (std::uint64_t step = 0; step < max_steps; ++step) {
    q += std::abs(delta_i_of_t(step * dt)) * dt;
    if (q >= p.delta_q_e) return (step + 1) * dt;
  }
  throw VerificationError(
      "oracle_capacitor_integrator: charge target not reached within step budget");
}

double oracle_capacitor_integrator(double i_old, double i_new, const PixelParams& p, double dt,
                                   std::uint64_t max_steps) {
  if (i_old == i_new)
    throw std::invalid_argument("oracle_capacitor_integrator: currents must differ");
  const double di = i_new - i_old;
  return oracle_capacitor_integrator([di](double) { return di; }, p, dt, max_steps);
}

}  // namespace dvspix
