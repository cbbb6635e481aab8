#pragma once

#include <cstdint>
#include <vector>

// Stimulus handling: grayscale frame sequences, per-pixel piecewise-linear
// luma traces and synthetic ramps. Luma is 8-bit scale (0..255) but carried
// as double so interpolated values keep full precision.

namespace dvspix {

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major, height*width

  [[nodiscard]] double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct FrameSequence {
  std::vector<Frame> frames;
  std::vector<double> timestamps;  // s, strictly increasing, one per frame

  void validate() const;
  [[nodiscard]] int width() const { return frames.empty() ? 0 : frames.front().width; }
  [[nodiscard]] int height() const { return frames.empty() ? 0 : frames.front().height; }
};

// Piecewise-linear luma-versus-time curve for one pixel.
class LumaTrace {
 public:
  LumaTrace() = default;
  LumaTrace(std::vector<double> times, std::vector<double> values);

  [[nodiscard]] double t_begin() const { return times_.front(); }
  [[nodiscard]] double t_end() const { return times_.back(); }
  [[nodiscard]] bool covers(double t) const { return t >= t_begin() && t <= t_end(); }
  [[nodiscard]] std::size_t size() const { return times_.size(); }

  /// Linear interpolation; throws std::out_of_range beyond the breakpoints.
  [[nodiscard]] double value_at(double t) const;

  /// Slope of the segment containing t, right-continuous at breakpoints.
  [[nodiscard]] double slope_at(double t) const;

  /// Exact mean luma over [t1, t2] (trapezoid sum over the breakpoints).
  [[nodiscard]] double mean_over(double t1, double t2) const;

  /// Index of the segment containing t (right-continuous; the last segment
  /// also owns t_end).
  [[nodiscard]] std::size_t segment_at(double t) const;

  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

struct RampStimulus {
  double l_start = 0.0;  // luma at t = 0
  double mu = 0.0;       // luma change speed, units/s (may be negative)
  double duration = 0.0; // s

  void validate() const;
};

/// BT.709 luma from 8-bit RGB.
[[nodiscard]] double bt709_luma(double r, double g, double b);

/// Insert factor-1 linearly interpolated frames between every adjacent pair.
/// Original frames are preserved bit-exact. factor = 1 is the identity.
[[nodiscard]] FrameSequence interpolate_frames(const FrameSequence& seq, int factor);

/// Luma trace of one pixel across a frame sequence.
[[nodiscard]] LumaTrace trace_from_frames(const FrameSequence& seq, int x, int y);

/// Two-breakpoint trace for a linear ramp.
[[nodiscard]] LumaTrace synth_ramp(const RampStimulus& ramp);

}  // namespace dvspix
