#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dvspix/circuit.hpp"
#include "dvspix/stimulus.hpp"

// Event generation. A pixel is armed at a reference luma; it fires when the
// log-luma change since the reference reaches the contrast threshold. In the
// delayed modes the event surfaces delta_t_e after the threshold crossing and
// the pixel is blind meanwhile: the next reference is the luma at emission
// time, so no inter-event interval can undercut the delay.

namespace dvspix {

enum class SimMode : std::uint8_t {
  Ideal,               // zero-delay comparator
  DelayedMechanistic,  // delta_t_e = delta_q_e / (k_photo * |L* - L_ref|)
  DelayedEmpirical,    // delta_t_e = k_delay / |local luma slope|
  Stochastic,          // inverse-Gaussian crossing times + empirical delay
};

struct SimConfig {
  SimMode mode = SimMode::Ideal;
  PixelParams params;
  double k_delay = 0.45;          // luma units, empirical delay constant
  double noise_sigma = 0.0;       // log-luma diffusion per sqrt(s)
  std::uint64_t rng_seed = 0;
  double time_step_oracle = 1e-6; // s, reference integrator step

  void validate() const;
};

struct EventRecord {
  double t = 0.0;  // s, quantized to whole nanoseconds
  int x = 0;
  int y = 0;
  Polarity polarity = Polarity::None;
};

struct SimStats {
  std::uint64_t events = 0;
  std::uint64_t skipped_dark_segments = 0;  // armed at zero luma, log undefined
  std::uint64_t unfinished_at_end = 0;      // charge still accumulating at trace end
};

// Crossing versus emission time of one event, for delay inspection.
struct EventTiming {
  double t_cross = 0.0;
  double t_emit = 0.0;
};

/// Zero-delay events of one pixel. x/y are stamped on the records.
[[nodiscard]] std::vector<EventRecord> simulate_pixel_ideal(
    const LumaTrace& trace, const SimConfig& cfg, int x = 0, int y = 0,
    SimStats* stats = nullptr);

/// Delayed events (mechanistic or empirical per cfg.mode).
[[nodiscard]] std::vector<EventRecord> simulate_pixel_delayed(
    const LumaTrace& trace, const SimConfig& cfg, int x = 0, int y = 0,
    SimStats* stats = nullptr, std::vector<EventTiming>* timings = nullptr);

/// Noisy crossing times: each wait is an inverse-Gaussian first-passage draw
/// with mean theta_c / drift and shape (theta_c / noise_sigma)^2, then the
/// empirical delay is appended.
[[nodiscard]] std::vector<EventRecord> simulate_pixel_stochastic(
    const LumaTrace& trace, const SimConfig& cfg, int x, int y,
    SimStats* stats = nullptr);

/// Full array against per-pixel traces; the merged stream is sorted by
/// (t, y, x, polarity). trace_for must be safe to call from several threads.
[[nodiscard]] std::vector<EventRecord> simulate_sensor(
    int width, int height,
    const std::function<const LumaTrace&(int x, int y)>& trace_for,
    const SimConfig& cfg, SimStats* stats = nullptr, int threads = 0);

/// Convenience: every pixel sees the same trace.
[[nodiscard]] std::vector<EventRecord> simulate_sensor(
    int width, int height, const LumaTrace& shared_trace, const SimConfig& cfg,
    SimStats* stats = nullptr, int threads = 0);

/// Convenience: traces extracted from a frame sequence.
[[nodiscard]] std::vector<EventRecord> simulate_sensor(
    const FrameSequence& seq, const SimConfig& cfg, SimStats* stats = nullptr,
    int threads = 0);

/// Reference fixed-step integrator: accumulates |delta_i(t)| on the junction
/// capacitance until delta_q_e is reached; returns the elapsed time (a whole
/// number of steps). Throws when the step budget runs out first.
[[nodiscard]] double oracle_capacitor_integrator(
    const std::function<double(double)>& delta_i_of_t, const PixelParams& p,
    double dt, std::uint64_t max_steps = 200000000ull);

/// Constant-step overload, comparable with event_delay(i_new - i_old).
[[nodiscard]] double oracle_capacitor_integrator(
    double i_old, double i_new, const PixelParams& p, double dt,
    std::uint64_t max_steps = 200000000ull);

/// Events ordering key: time, then row, column, polarity.
[[nodiscard]] bool event_before(const EventRecord& a, const EventRecord& b);

/// Round a time to the whole-nanosecond grid used by the event stream.
[[nodiscard]] double quantize_time(double t);

}  // namespace dvspix
